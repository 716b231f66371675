"""Finite simple graphs with a fixed total order on the vertices.

Vertices are the integers ``0..n-1`` and their integer order is the order
used by self-bounding walks.  Text files use 1-based labels.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class OrderedGraph:
    """Immutable simple graph on ``range(n)``.

    ``adj[i]`` is the ascending tuple of neighbours of ``i``.  ``labels``
    maps each vertex to its label in a parent graph (identity for graphs
    built directly).
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match n")
        for i, nb in enumerate(self.adj):
            if list(nb) != sorted(set(nb)):
                raise ValueError(f"neighbours of {i} must be strictly ascending")
            for j in nb:
                if j == i:
                    raise ValueError(f"self-loop at {i}")
                if not 0 <= j < self.n:
                    raise ValueError(f"neighbour {j} of {i} out of range")
                if i not in self.adj[j]:
                    raise ValueError(f"asymmetric adjacency {i}-{j}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        masks = tuple(sum(1 << j for j in nb) for nb in self.adj)
        object.__setattr__(self, "_masks", masks)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "OrderedGraph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as integer bitmasks."""
        return self._masks  # type: ignore[attr-defined]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in self.adj[i] if i < j]

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.masks[i] >> j & 1)

    def is_walk(self, walk: Sequence[int]) -> bool:
        if not walk or any(not 0 <= v < self.n for v in walk):
            return False
        return all(self.has_edge(a, b) for a, b in zip(walk, walk[1:]))

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen, stack = {0}, [0]
        while stack:
            for j in self.adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def content_hash(self) -> str:
        """Stable digest of ``n`` and the edge list."""
        text = f"{self.n}\n" + "".join(f"{i} {j}\n" for i, j in self.edges())
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


def neighbors(g: OrderedGraph, i: int) -> frozenset[int]:
    if not 0 <= i < g.n:
        raise IndexError(f"vertex {i} out of range for n={g.n}")
    return frozenset(g.adj[i])


def as_mask(s: Iterable[int] | int) -> int:
    if isinstance(s, int):
        return s
    m = 0
    for v in s:
        m |= 1 << int(v)
    return m


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def induced_subgraph(g: OrderedGraph, s: Iterable[int]) -> OrderedGraph:
    """Subgraph induced by ``s``, relabelled ``0..|s|-1`` in increasing order.

    The returned graph's ``labels`` give the vertex of ``g`` behind each new
    vertex (composed with ``g.labels``).
    """
    verts = sorted(mask_to_set(s) if isinstance(s, int) else set(s))
    for v in verts:
        if not 0 <= v < g.n:
            raise IndexError(f"vertex {v} out of range for n={g.n}")
    pos = {v: k for k, v in enumerate(verts)}
    adj = tuple(tuple(pos[u] for u in g.adj[v] if u in pos) for v in verts)
    return OrderedGraph(len(verts), adj, tuple(g.labels[v] for v in verts))


# -- constructors -----------------------------------------------------------

def empty_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, [])


def complete_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> OrderedGraph:
    return OrderedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def petersen_graph() -> OrderedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return OrderedGraph.from_edges(10, outer + spokes + inner)


def torus_grid(rows: int, cols: int) -> OrderedGraph:
    """4-regular discrete torus (needs ``rows, cols >= 3``)."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            edges.append((v, r * cols + (c + 1) % cols))
            edges.append((v, ((r + 1) % rows) * cols + c))
    return OrderedGraph.from_edges(rows * cols, edges)


def from_networkx(nxg) -> OrderedGraph:
    nodes = sorted(nxg.nodes())
    pos = {v: k for k, v in enumerate(nodes)}
    return OrderedGraph.from_edges(len(nodes), [(pos[a], pos[b]) for a, b in nxg.edges()])


def connected_graphs(n: int) -> list[OrderedGraph]:
    """All connected graphs on ``n`` vertices up to isomorphism (n <= 7)."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    if n > 7:
        raise ValueError("graph atlas only covers n <= 7")
    return [from_networkx(h) for h in graph_atlas_g()
            if h.number_of_nodes() == n and (n == 0 or nx.is_connected(h))]


# -- text formats -----------------------------------------------------------

def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_graph(text: str) -> OrderedGraph:
    """Parse ``n`` followed by 1-based ``i j`` edge lines."""
    lines = list(_data_lines(text))
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        n = int(lines[0][1])
    except ValueError:
        raise GraphFormatError(f"line {lines[0][0]}: expected vertex count") from None
    if n < 0:
        raise GraphFormatError("negative vertex count")
    seen: set[tuple[int, int]] = set()
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex labels")
        try:
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer label") from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"line {lineno}: label out of range 1..{n}")
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {i + 1} {j + 1}")
        seen.add(key)
        edges.append(key)
    return OrderedGraph.from_edges(n, edges)


def format_graph(g: OrderedGraph) -> str:
    return f"{g.n}\n" + "".join(f"{i + 1} {j + 1}\n" for i, j in g.edges())


def read_graph(path: str | Path) -> OrderedGraph:
    return parse_graph(Path(path).read_text())


def parse_vertex_sets(text: str, n: int | None = None) -> list[frozenset[int]]:
    """One set per line, 1-based labels; blank lines are skipped."""
    sets = []
    for lineno, line in _data_lines(text):
        try:
            s = frozenset(int(t) - 1 for t in line.replace(",", " ").split())
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer label") from None
        if any(v < 0 or (n is not None and v >= n) for v in s):
            raise GraphFormatError(f"line {lineno}: label out of range")
        sets.append(s)
    return sets


def format_vertex_sets(sets: Iterable[Iterable[int]]) -> str:
    return "".join(" ".join(str(v + 1) for v in sorted(s)) + "\n" for s in sets)
