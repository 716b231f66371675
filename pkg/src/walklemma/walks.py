"""Self-bounding walks and filter-restricted class automata on finite graphs.

Conventions (they matter for what counts as self-bounding):

* A walk that *starts* at ``i`` begins with every vertex ``>= i`` forbidden,
  so on a clique the self-bounding walks are the strictly descending
  sequences.
* A step ``i -> j`` needs ``j`` adjacent and not forbidden, and then forbids
  every neighbour of ``i`` that is ``>= j``.
* Inside a filter ``S``, the part of a walk that re-enters ``S`` after
  leaving it is replayed in ``G[S]`` with only its entry vertex forbidden.
  The part that starts the whole walk uses the start rule above.

With these rules every subwalk of a self-bounding walk passes the filter
test, so the automaton language always contains all self-bounding walks.
"""
from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import OrderedGraph, as_mask, induced_subgraph, mask_to_set

DESCENDING = "descending"
ENTRY = "entry"


class StateBudgetExceeded(RuntimeError):
    def __init__(self, budget: int, classes: int):
        super().__init__(f"class automaton exceeded budget of {budget} states "
                         f"({classes} discovered)")
        self.budget = budget
        self.classes = classes


class NotAWalk(ValueError):
    pass


@dataclass(frozen=True)
class SelfBoundingState:
    terminal: int
    forbidden: int  # bitmask

    @property
    def forbidden_set(self) -> frozenset[int]:
        return mask_to_set(self.forbidden)


def ge_mask(i: int, n: int) -> int:
    """Bitmask of ``{i, ..., n-1}``."""
    return ((1 << n) - 1) & ~((1 << i) - 1)


def start_state(g: OrderedGraph, i: int, start: str = DESCENDING) -> SelfBoundingState:
    if start == DESCENDING:
        return SelfBoundingState(i, ge_mask(i, g.n))
    if start == ENTRY:
        return SelfBoundingState(i, 1 << i)
    raise ValueError(f"unknown start rule {start!r}")


def step(g: OrderedGraph, st: SelfBoundingState, j: int) -> SelfBoundingState | None:
    """Extend by ``j``; ``None`` if ``j`` is not adjacent or is forbidden."""
    i = st.terminal
    nb = g.masks[i]
    if not nb >> j & 1 or st.forbidden >> j & 1:
        return None
    return SelfBoundingState(j, st.forbidden | (nb & ~((1 << j) - 1)))


def replay(g: OrderedGraph, walk: Sequence[int], start: str = DESCENDING) -> SelfBoundingState | None:
    """Final state of ``walk`` if it is self-bounding, else ``None``."""
    if not walk:
        return None
    st = start_state(g, walk[0], start)
    for j in walk[1:]:
        st = step(g, st, j)
        if st is None:
            return None
    return st


def enumerate_self_bounding(g: OrderedGraph, start: str = DESCENDING) -> list[tuple[tuple[int, ...], SelfBoundingState]]:
    """All self-bounding walks with their final states, in DFS order.

    The set is finite: every step forbids at least the vertex entered.
    """
    out = []

    def dfs(walk, st):
        out.append((walk, st))
        nb = g.masks[st.terminal] & ~st.forbidden
        for j in g.adj[st.terminal]:
            if nb >> j & 1:
                dfs(walk + (j,), step(g, st, j))

    for i in range(g.n):
        dfs((i,), start_state(g, i, start))
    return out


# -- filter families --------------------------------------------------------

def normalize_filters(filters: Iterable[Iterable[int] | int], n: int) -> tuple[int, ...]:
    """Filters as bitmasks; empty and repeated filters are dropped."""
    seen = set()
    out = []
    full = (1 << n) - 1
    for f in filters:
        m = as_mask(f)
        if m & ~full:
            raise ValueError("filter contains a vertex outside the graph")
        if m and m not in seen:
            seen.add(m)
            out.append(m)
    return tuple(out)


def preset_filters(g: OrderedGraph, name: str, seed: int = 0, count: int | None = None) -> list[frozenset[int]]:
    """Named filter families: none, edges, neighborhoods, full, random."""
    if name == "none":
        return []
    if name == "edges":
        return [frozenset(e) for e in g.edges()]
    if name == "neighborhoods":
        return [frozenset(g.adj[i]) | {i} for i in range(g.n)]
    if name == "full":
        return [frozenset(range(g.n))] if g.n else []
    if name == "random":
        rng = random.Random(seed)
        k = count if count is not None else max(1, g.n // 2)
        fams = []
        for _ in range(k):
            size = rng.randint(2, max(2, g.n))
            fams.append(frozenset(rng.sample(range(g.n), min(size, g.n))))
        return fams
    raise ValueError(f"unknown filter preset {name!r}")


def filters_hash(filters: Sequence[int]) -> str:
    text = "".join(f"{m:x}\n" for m in filters)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- reference acceptance checker --------------------------------------------

def is_walk_accepted(walk: Sequence[int], g: OrderedGraph, filters) -> bool:
    """Brute-force check that every subwalk inside each filter is self-bounding.

    Subwalks are replayed in the induced subgraph; a subwalk starting at
    position 0 uses the start rule, any other uses the entry rule.
    """
    walk = tuple(walk)
    if not g.is_walk(walk):
        raise NotAWalk(f"{walk} is not a walk on the graph")
    for fmask in normalize_filters(filters, g.n):
        members = sorted(mask_to_set(fmask))
        h = induced_subgraph(g, members)
        pos = {v: k for k, v in enumerate(members)}
        L = len(walk)
        for a in range(L):
            if walk[a] not in pos:
                continue
            b = a
            while b < L and walk[b] in pos:
                b += 1
            # every subwalk walk[a:c], a < c <= b
            for c in range(a + 1, b + 1):
                sub = [pos[v] for v in walk[a:c]]
                if replay(h, sub, DESCENDING if a == 0 else ENTRY) is None:
                    return False
    return True


# -- class automaton ----------------------------------------------------------

@dataclass
class ClassAutomaton:
    """Deterministic automaton whose states are walk classes.

    Transitions are stored as CSR arrays: the successors of class ``c`` are
    ``succ[indptr[c]:indptr[c+1]]`` reached by the letters in
    ``letter[...]`` (vertices for finite graphs, direction indices for
    lattices).  ``start[v]`` is the class of the one-vertex walk at ``v``.
    """

    terminal: np.ndarray
    indptr: np.ndarray
    succ: np.ndarray
    letter: np.ndarray
    start: np.ndarray
    keys: list | None = None
    meta: dict = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return len(self.terminal)

    @property
    def num_transitions(self) -> int:
        return len(self.succ)

    def successors(self, c: int) -> np.ndarray:
        return self.succ[self.indptr[c]:self.indptr[c + 1]]

    def successor(self, c: int, x: int) -> int:
        lo, hi = self.indptr[c], self.indptr[c + 1]
        hits = np.flatnonzero(self.letter[lo:hi] == x)
        return int(self.succ[lo + hits[0]]) if len(hits) else -1

    def run(self, walk: Sequence[int]) -> int:
        """Class reached by a walk given as start vertex then letters; -1 if rejected."""
        if not walk:
            return -1
        c = int(self.start[walk[0]])
        for x in walk[1:]:
            if c < 0:
                return -1
            c = self.successor(c, x)
        return c

    def accepts(self, walk: Sequence[int]) -> bool:
        return self.run(walk) >= 0

    def is_deterministic(self) -> bool:
        for c in range(self.num_classes):
            lets = self.letter[self.indptr[c]:self.indptr[c + 1]]
            if len(set(lets.tolist())) != len(lets):
                return False
        return True

    def reachable(self) -> np.ndarray:
        seen = np.zeros(self.num_classes, dtype=bool)
        queue = deque(int(s) for s in set(self.start.tolist()) if s >= 0)
        for s in queue:
            seen[s] = True
        while queue:
            c = queue.popleft()
            for d in self.successors(c):
                if not seen[d]:
                    seen[d] = True
                    queue.append(int(d))
        return seen

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for arr in (self.terminal, self.indptr, self.succ, self.letter, self.start):
            h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
            h.update(b"|")
        return h.hexdigest()[:16]

    def dump(self) -> str:
        """Line-oriented debug dump: ``id terminal | states | letter->id ...``."""
        lines = []
        for c in range(self.num_classes):
            key = self.keys[c] if self.keys is not None else ()
            states = " ".join(
                "{" + ",".join(str(v + 1) for v in sorted(mask_to_set(m))) + "}"
                for m in key[1:]) if key else ""
            lo, hi = self.indptr[c], self.indptr[c + 1]
            trans = " ".join(f"{self.letter[k] + 1}->{self.succ[k]}" for k in range(lo, hi))
            lines.append(f"{c} {self.terminal[c] + 1} | {states} | {trans}")
        return "\n".join(lines) + "\n"


def _to_csr(rows):
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for c, r in enumerate(rows):
        indptr[c + 1] = indptr[c] + len(r)
    succ = np.fromiter((d for r in rows for _, d in r), dtype=np.int64, count=int(indptr[-1]))
    letter = np.fromiter((x for r in rows for x, _ in r), dtype=np.int64, count=int(indptr[-1]))
    return indptr, succ, letter


def build_class_automaton(g: OrderedGraph, filters=(), budget: int = 2_000_000) -> ClassAutomaton:
    """Breadth-first construction of the filter-suffix class automaton.

    A class is ``(terminal, forbidden-mask per filter containing terminal)``
    with filters in family order.  Appending ``x`` is allowed iff, for each
    filter holding both the terminal and ``x``, ``x`` is not forbidden in
    that filter's suffix state.  Filters that ``x`` enters afresh start with
    ``{x}`` forbidden.
    """
    fams = normalize_filters(filters, g.n)
    n = g.n
    containing = [[k for k, f in enumerate(fams) if f >> v & 1] for v in range(n)]
    pos_in = [{k: t for t, k in enumerate(containing[v])} for v in range(n)]
    below = [(1 << j) - 1 for j in range(n)]

    # per (i, j) edge: list of (slot in i or -1, add mask) for filters containing j
    plan = {}
    for i in range(n):
        for j in g.adj[i]:
            entries = []
            for k in containing[j]:
                f = fams[k]
                if f >> i & 1:
                    entries.append((pos_in[i][k], g.masks[i] & f & ~below[j]))
                else:
                    entries.append((-1, 1 << j))
            plan[i, j] = entries

    index: dict[tuple, int] = {}
    keys: list[tuple] = []

    def intern(key):
        c = index.get(key)
        if c is None:
            c = len(keys)
            if c >= budget:
                raise StateBudgetExceeded(budget, c)
            index[key] = c
            keys.append(key)
        return c

    start = np.empty(n, dtype=np.int64)
    for i in range(n):
        ge = ge_mask(i, n)
        start[i] = intern((i,) + tuple(fams[k] & ge for k in containing[i]))

    rows = []
    c = 0
    while c < len(keys):
        key = keys[c]
        i = key[0]
        row = []
        for j in g.adj[i]:
            bit = 1 << j
            new = [j]
            for slot, add in plan[i, j]:
                if slot < 0:
                    new.append(add)
                else:
                    fm = key[1 + slot]
                    if fm & bit:
                        break
                    new.append(fm | add)
            else:
                row.append((j, intern(tuple(new))))
        rows.append(row)
        c += 1

    indptr, succ, letter = _to_csr(rows)
    terminal = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
    meta = {"kind": "graph", "graph_hash": g.content_hash(),
            "filter_hash": filters_hash(fams), "filters": len(fams)}
    return ClassAutomaton(terminal, indptr, succ, letter, start, keys, meta)


def class_count_bound(g: OrderedGraph, filters) -> int:
    """Upper bound on the number of classes from per-filter state counts.

    Sums, over terminals ``v``, the product over filters containing ``v`` of
    the number of distinct self-bounding states of ``G[S]`` ending at ``v``
    (either start rule).
    """
    fams = normalize_filters(filters, g.n)
    per = []
    for f in fams:
        members = sorted(mask_to_set(f))
        h = induced_subgraph(g, members)
        counts: dict[int, set] = {}
        for rule in (DESCENDING, ENTRY):
            for _, st in enumerate_self_bounding(h, rule):
                counts.setdefault(members[st.terminal], set()).add(st.forbidden)
        per.append((f, {v: len(s) for v, s in counts.items()}))
    total = 0
    for v in range(g.n):
        prod = 1
        for f, cnt in per:
            if f >> v & 1:
                prod *= cnt.get(v, 1)
        total += prod
    return total


def minimize(a: ClassAutomaton) -> ClassAutomaton:
    """Merge classes with identical terminal and identical futures.

    Moore-style partition refinement on (terminal, letter -> block).  The
    minimal fixed point of the validity recurrence is constant on merged
    classes, so solver results are unchanged.
    """
    n = a.num_classes
    block = np.unique(a.terminal, return_inverse=True)[1].astype(np.int64)
    nblocks = int(block.max()) + 1 if n else 0
    while True:
        sigs = {}
        new = np.empty(n, dtype=np.int64)
        for c in range(n):
            lo, hi = a.indptr[c], a.indptr[c + 1]
            sig = (int(block[c]),) + tuple(sorted(zip(a.letter[lo:hi].tolist(),
                                                      block[a.succ[lo:hi]].tolist())))
            new[c] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == nblocks:
            break
        block, nblocks = new, len(sigs)
    # representative rows
    rep = {}
    for c in range(n):
        rep.setdefault(int(block[c]), c)
    order = sorted(rep, key=lambda b: rep[b])
    remap = {b: k for k, b in enumerate(order)}
    rows = []
    for b in order:
        c = rep[b]
        lo, hi = a.indptr[c], a.indptr[c + 1]
        rows.append([(int(x), remap[int(block[d])]) for x, d in zip(a.letter[lo:hi], a.succ[lo:hi])])
    indptr, succ, letter = _to_csr(rows)
    terminal = np.array([a.terminal[rep[b]] for b in order], dtype=np.int64)
    start = np.array([remap[int(block[s])] for s in a.start], dtype=np.int64)
    keys = [a.keys[rep[b]] for b in order] if a.keys is not None else None
    return ClassAutomaton(terminal, indptr, succ, letter, start, keys, dict(a.meta, minimized=True))
