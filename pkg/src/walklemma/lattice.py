"""Class automata for periodic lattices, quotiented by translation.

Sites are integer tuples.  The hexagonal lattice uses brick-wall
coordinates ``(x, y)``: site ``(x, y)`` is joined to ``(x +- 1, y)`` and to
``(x, y + 1)`` when ``x + y`` is even, ``(x, y - 1)`` otherwise.  Its
sublattice is ``(x + y) % 2`` and translations are the vectors of even
coordinate sum.  Square and cubic lattices have a single sublattice.

A filter family is given by finitely many patterns; the family is every
lattice translate of every pattern.  A class is stored as a row of
``uint64`` words: the terminal's sublattice followed by one forbidden-set
bitmask per *slot*.  A slot ``(j, k)`` stands for the translate of pattern
``j`` that puts its ``k``-th site on the terminal, and bit ``m`` of the
mask refers to the pattern's ``m``-th site, so rows are translation
invariant by construction.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._accel import backend
from .graph import OrderedGraph
from .solver import LambdaBound, SolverParams, check_certificate, lambda_lower_bound
from .walks import (ClassAutomaton, StateBudgetExceeded, enumerate_self_bounding,
                    is_walk_accepted)

Site = tuple[int, ...]

MAX_PATTERN_SITES = 63
DEFAULT_BUDGET = 2_000_000


class PatternFormatError(ValueError):
    pass


# -- lattices ---------------------------------------------------------------

class LatticeSpec:
    """A vertex-transitive-up-to-sublattice lattice with a translation-invariant order."""

    kind: str = ""
    dim: int = 0
    nsub: int = 1

    def neighbors(self, s: Site) -> list[Site]:
        raise NotImplementedError

    def sublattice(self, s: Site) -> int:
        return 0

    def key(self, s: Site) -> tuple:
        return tuple(s)

    def origin(self, sub: int = 0) -> Site:
        return (0,) * self.dim

    def is_translation(self, v: Site) -> bool:
        return True

    def degree(self) -> int:
        return len(self.neighbors(self.origin(0)))

    # file coordinates coincide with internal ones except for the hexagonal cell
    def from_cell(self, cell: Site, sub: int | None) -> Site:
        if sub not in (None, 0):
            raise PatternFormatError(f"{self.kind} lattice has a single sublattice")
        if len(cell) != self.dim:
            raise PatternFormatError(f"{self.kind} sites need {self.dim} coordinates")
        return tuple(cell)

    def to_cell(self, s: Site) -> tuple[Site, int | None]:
        return tuple(s), None

    def __repr__(self):
        return f"LatticeSpec({self.kind})"


class _Square(LatticeSpec):
    kind, dim = "square", 2

    def neighbors(self, s):
        x, y = s
        return [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]


class _Cubic(LatticeSpec):
    kind, dim = "cubic", 3

    def neighbors(self, s):
        out = []
        for i in range(3):
            for e in (1, -1):
                t = list(s)
                t[i] += e
                out.append(tuple(t))
        return out


class _Hexagonal(LatticeSpec):
    kind, dim, nsub = "hexagonal", 2, 2

    def neighbors(self, s):
        x, y = s
        return [(x + 1, y), (x - 1, y), (x, y + 1) if (x + y) % 2 == 0 else (x, y - 1)]

    def sublattice(self, s):
        return (s[0] + s[1]) % 2

    def key(self, s):
        return (self.sublattice(s), s[1], s[0])

    def origin(self, sub=0):
        return (sub, 0)

    def is_translation(self, v):
        return (v[0] + v[1]) % 2 == 0

    # cell (a, b) with sublattice s sits at brick coordinates (2a + b + s, b)
    def from_cell(self, cell, sub):
        if len(cell) != 2:
            raise PatternFormatError("hexagonal sites need 2 coordinates")
        s = 0 if sub is None else sub
        if s not in (0, 1):
            raise PatternFormatError(f"hexagonal sublattice must be 0 or 1, got {s}")
        a, b = cell
        return (2 * a + b + s, b)

    def to_cell(self, site):
        x, y = site
        s = self.sublattice(site)
        return ((x - y - s) // 2, y), s


SQUARE = _Square()
CUBIC = _Cubic()
HEXAGONAL = _Hexagonal()
LATTICES = {"square": SQUARE, "cubic": CUBIC, "hexagonal": HEXAGONAL}


def get_lattice(kind: str) -> LatticeSpec:
    try:
        return LATTICES[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown lattice {kind!r}; choose from {sorted(LATTICES)}") from None


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def ball(spec: LatticeSpec, radius: int, center: Site | None = None) -> set[Site]:
    """Sites within graph distance ``radius`` of ``center``."""
    center = spec.origin(0) if center is None else tuple(center)
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for s in frontier:
            for t in spec.neighbors(s):
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return seen


def canonical_site(spec: LatticeSpec, s: Site) -> tuple[Site, Site]:
    """Translate ``s`` onto its sublattice origin; returns ``(origin, shift)``."""
    o = spec.origin(spec.sublattice(s))
    return o, _sub(o, s)


# -- filter patterns --------------------------------------------------------

@dataclass(frozen=True)
class FilterPattern:
    """Patterns in canonical position; the filter family is all their translates."""

    lattice: str
    patterns: tuple[tuple[Site, ...], ...]
    name: str = field(default="custom", compare=False)

    @classmethod
    def build(cls, spec: LatticeSpec, sets: Iterable[Iterable[Site]], name: str = "custom"):
        canon = set()
        for s in sets:
            sites = [tuple(int(c) for c in x) for x in s]
            if not sites:
                continue
            if any(len(x) != spec.dim for x in sites):
                raise PatternFormatError(f"{spec.kind} sites need {spec.dim} coordinates")
            if len(set(sites)) > MAX_PATTERN_SITES:
                raise PatternFormatError(f"patterns are limited to {MAX_PATTERN_SITES} sites")
            low = min(sites, key=spec.key)
            _, shift = canonical_site(spec, low)
            moved = sorted({_add(x, shift) for x in sites}, key=spec.key)
            canon.add(tuple(moved))
        pats = tuple(sorted(canon, key=lambda p: (len(p), [spec.key(x) for x in p])))
        return cls(spec.kind, pats, name)

    @property
    def spec(self) -> LatticeSpec:
        return get_lattice(self.lattice)

    def content_hash(self) -> str:
        text = self.lattice + "\n" + "\n".join(
            " ".join(",".join(map(str, s)) for s in p) for p in self.patterns)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def max_span(self) -> int:
        """Largest lattice distance between two sites of one pattern."""
        spec = self.spec
        out = 0
        for p in self.patterns:
            for q in p:
                dist = _distances(spec, q, set(p))
                out = max(out, max(dist.values()))
        return out


def _distances(spec: LatticeSpec, src: Site, targets: set[Site]) -> dict[Site, int]:
    """Lattice graph distance from ``src`` to each target (plain BFS)."""
    seen = {src: 0}
    frontier = [src]
    left = set(targets) - {src}
    d = 0
    while left:
        d += 1
        nxt = []
        for s in frontier:
            for t in spec.neighbors(s):
                if t not in seen:
                    seen[t] = d
                    nxt.append(t)
                    left.discard(t)
        frontier = nxt
    return {t: seen[t] for t in targets}


# pattern behind the ``headline`` preset on each lattice
HEADLINE = {"square": "ball:3", "cubic": "box:3x3x3", "hexagonal": "ball:4"}


def box_patterns(spec: LatticeSpec, sides: Sequence[int]) -> list[list[Site]]:
    """Axis-parallel boxes with the given side lengths, in every orientation."""
    if spec.kind == "hexagonal":
        raise ValueError("box patterns are defined for square and cubic lattices")
    if len(sides) != spec.dim or min(sides) < 1:
        raise ValueError(f"{spec.kind} boxes need {spec.dim} positive sides")
    out = []
    for perm in sorted(set(itertools.permutations(sides))):
        out.append(list(itertools.product(*(range(k) for k in perm))))
    return out


def preset_pattern(spec: LatticeSpec, name: str) -> FilterPattern:
    """``none``, ``edges``, ``neighborhoods``, ``ball:<r>``, ``box:<a>x<b>[x<c>]`` or ``headline``."""
    name = name.lower()
    origins = [spec.origin(s) for s in range(spec.nsub)]
    if name == "none":
        return FilterPattern.build(spec, [], name)
    if name == "edges":
        return FilterPattern.build(spec, [(o, y) for o in origins for y in spec.neighbors(o)], name)
    if name in ("neighborhoods", "neighbourhoods"):
        return FilterPattern.build(spec, [ball(spec, 1, o) for o in origins], "neighborhoods")
    if name == "headline":
        inner = preset_pattern(spec, HEADLINE[spec.kind])
        return FilterPattern(inner.lattice, inner.patterns, f"headline({inner.name})")
    m = re.fullmatch(r"ball:(\d+)", name)
    if m:
        r = int(m.group(1))
        return FilterPattern.build(spec, [ball(spec, r, o) for o in origins], name)
    m = re.fullmatch(r"box:(\d+(?:x\d+)*)", name)
    if m:
        sides = [int(t) for t in m.group(1).split("x")]
        return FilterPattern.build(spec, box_patterns(spec, sides), name)
    raise ValueError(f"unknown pattern preset {name!r}")


_SITE_RE = re.compile(r"\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)(?::(\d+))?")


def parse_pattern(text: str) -> FilterPattern:
    """Pattern file: ``lattice=<kind>`` then one set per line of ``(dx,dy[,dz])[:sub]``."""
    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines or not lines[0][1].startswith("lattice="):
        raise PatternFormatError("pattern file must start with 'lattice=<kind>'")
    try:
        spec = get_lattice(lines[0][1].split("=", 1)[1].strip())
    except ValueError as exc:
        raise PatternFormatError(str(exc)) from None
    sets = []
    for lineno, line in lines[1:]:
        sites = []
        pos = 0
        for m in _SITE_RE.finditer(line):
            if line[pos:m.start()].strip(" ;,"):
                raise PatternFormatError(f"line {lineno}: cannot parse {line[pos:m.start()]!r}")
            cell = tuple(int(t) for t in m.group(1).split(","))
            sub = int(m.group(2)) if m.group(2) is not None else None
            try:
                sites.append(spec.from_cell(cell, sub))
            except PatternFormatError as exc:
                raise PatternFormatError(f"line {lineno}: {exc}") from None
            pos = m.end()
        if line[pos:].strip(" ;,") or not sites:
            raise PatternFormatError(f"line {lineno}: expected sites like (dx,dy)")
        sets.append(sites)
    return FilterPattern.build(spec, sets, "file")


def format_pattern(pattern: FilterPattern) -> str:
    spec = pattern.spec
    out = [f"lattice={spec.kind}"]
    for p in pattern.patterns:
        items = []
        for s in p:
            cell, sub = spec.to_cell(s)
            items.append("(" + ",".join(map(str, cell)) + ")" + (f":{sub}" if sub is not None else ""))
        out.append(" ".join(items))
    return "\n".join(out) + "\n"


def load_pattern(spec: LatticeSpec, arg: str) -> FilterPattern:
    """Preset name or path to a pattern file (which must match ``spec``)."""
    path = Path(arg)
    if path.is_file():
        pat = parse_pattern(path.read_text())
        if pat.lattice != spec.kind:
            raise PatternFormatError(f"pattern file is for {pat.lattice}, not {spec.kind}")
        return pat
    return preset_pattern(spec, arg)


# -- automaton construction -------------------------------------------------

@dataclass
class LatticeAutomaton(ClassAutomaton):
    """Class automaton whose terminals are sublattices and letters direction indices."""

    rows: np.ndarray | None = field(default=None, repr=False)
    slots: list = field(default_factory=list, repr=False)

    def accepts_sites(self, spec: LatticeSpec, walk: Sequence[Site]) -> bool:
        return self.accepts(walk_letters(spec, walk))

    def row_masks(self, c: int) -> list[int]:
        return [int(v) for v in self.rows[c, 1:1 + len(self.slots[int(self.rows[c, 0])])]]


def walk_letters(spec: LatticeSpec, walk: Sequence[Site]) -> list[int]:
    """Start sublattice followed by the direction index of every step."""
    walk = [tuple(s) for s in walk]
    out = [spec.sublattice(walk[0])]
    for a, b in zip(walk, walk[1:]):
        nb = spec.neighbors(a)
        if b not in nb:
            raise ValueError(f"{a} and {b} are not adjacent")
        out.append(nb.index(b))
    return out


def _slot_tables(spec: LatticeSpec, pattern: FilterPattern, window: int | None):
    pats = pattern.patterns
    pidx = [{q: k for k, q in enumerate(p)} for p in pats]
    near = None
    if window is not None:
        near = [ball(spec, window, spec.origin(s)) for s in range(spec.nsub)]
    slots = []
    for s in range(spec.nsub):
        o = spec.origin(s)
        row = []
        for j, p in enumerate(pats):
            for k, q in enumerate(p):
                if spec.sublattice(q) != s:
                    continue
                t = _sub(o, q)
                if near is not None and any(_add(t, x) not in near[s] for x in p):
                    continue
                row.append((j, k))
        slots.append(row)
    return pats, pidx, slots


def _transition_plan(spec, pats, pidx, slots):
    """Flattened per-(sublattice, direction) slot plans for the BFS kernel."""
    ndir = max(len(spec.neighbors(spec.origin(s))) for s in range(spec.nsub))
    slot_of = [{sl: i for i, sl in enumerate(slots[s])} for s in range(spec.nsub)]
    nsub_dirs = np.zeros(spec.nsub, dtype=np.int64)
    target = np.zeros(spec.nsub * ndir, dtype=np.int64)
    ptr = [0]
    old, bit, add = [], [], []
    for s in range(spec.nsub):
        o = spec.origin(s)
        nbrs_o = spec.neighbors(o)
        nsub_dirs[s] = len(nbrs_o)
        for d in range(ndir):
            if d < len(nbrs_o):
                y = nbrs_o[d]
                s2 = spec.sublattice(y)
                target[s * ndir + d] = s2
                for j, k2 in slots[s2]:
                    t = _sub(y, pats[j][k2])
                    k = pidx[j].get(_sub(o, t))
                    if k is not None and (j, k) in slot_of[s]:
                        m = 0
                        for z in nbrs_o:
                            if spec.key(z) >= spec.key(y):
                                kz = pidx[j].get(_sub(z, t))
                                if kz is not None:
                                    m |= 1 << kz
                        old.append(slot_of[s][(j, k)])
                        bit.append(1 << k2)
                        add.append(m)
                    else:
                        old.append(-1)
                        bit.append(0)
                        add.append(1 << k2)
            ptr.append(len(old))
    return (nsub_dirs, ndir, target, np.array(ptr, dtype=np.int64),
            np.array(old, dtype=np.int64), np.array(bit, dtype=np.uint64),
            np.array(add, dtype=np.uint64))


def _roots(spec, pats, slots, width):
    roots = np.zeros((spec.nsub, width), dtype=np.uint64)
    for s in range(spec.nsub):
        o = spec.origin(s)
        roots[s, 0] = s
        for i, (j, k) in enumerate(slots[s]):
            t = _sub(o, pats[j][k])
            m = 0
            for kk, q in enumerate(pats[j]):
                if spec.key(_add(t, q)) >= spec.key(o):
                    m |= 1 << kk
            roots[s, 1 + i] = m
    return roots


def build_lattice_automaton(spec: LatticeSpec, pattern: FilterPattern | None = None,
                            window: int | None = None,
                            budget: int = DEFAULT_BUDGET) -> LatticeAutomaton:
    """Breadth-first enumeration of translation classes from the sublattice roots.

    ``window=None`` tracks every filter containing the terminal.  A finite
    window tracks only filters lying within that graph distance of the
    terminal; a filter coming back into view starts afresh, which can only
    enlarge the accepted language.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if window is not None and window < 0:
        raise ValueError("window must be non-negative")
    pattern = pattern if pattern is not None else preset_pattern(spec, "none")
    if pattern.lattice != spec.kind:
        raise ValueError(f"pattern is for {pattern.lattice}, not {spec.kind}")
    pats, pidx, slots = _slot_tables(spec, pattern, window)
    width = 1 + max(len(s) for s in slots)
    plan = _transition_plan(spec, pats, pidx, slots)
    roots = _roots(spec, pats, slots, width)
    rows, indptr, succ, letter, start, status = kernels.lattice_bfs(roots, *plan, budget)
    if status < 0:
        raise StateBudgetExceeded(budget, len(rows))
    terminal = rows[:, 0].astype(np.int64)
    meta = {"kind": "lattice", "lattice": spec.kind, "pattern": pattern.name,
            "pattern_hash": pattern.content_hash(), "window": window}
    return LatticeAutomaton(terminal, indptr, succ, letter, start, None, meta, rows=rows, slots=slots)


# -- bounds and reports -----------------------------------------------------

@dataclass
class BoundReport:
    lattice: str
    pattern: str
    pattern_hash: str
    window: int | None
    classes: int
    transitions: int
    lam: float
    bracket: tuple[float, float]
    certificate_ok: bool
    automaton_fingerprint: str
    params: SolverParams
    probes: int = 0
    undetermined: int = 0
    certificate_file: str | None = None
    build_seconds: float = 0.0
    solve_seconds: float = 0.0

    KEYS = ("lattice", "pattern", "pattern_hash", "window", "classes", "transitions",
            "lambda", "bracket", "certificate_ok", "automaton_fingerprint", "certificate_file",
            "probes", "undetermined", "solver", "backend")

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "lattice": self.lattice,
            "pattern": self.pattern,
            "pattern_hash": self.pattern_hash,
            "window": self.window,
            "classes": self.classes,
            "transitions": self.transitions,
            "lambda": self.lam if self.certificate_ok else None,
            "bracket": list(self.bracket),
            "certificate_ok": self.certificate_ok,
            "automaton_fingerprint": self.automaton_fingerprint,
            "certificate_file": self.certificate_file,
            "probes": self.probes,
            "undetermined": self.undetermined,
            "solver": {"max_iter": self.params.max_iter, "margin": self.params.margin,
                       "inflation": self.params.inflation, "tol": self.params.tol,
                       "accel_iter": self.params.accel_iter},
            "backend": backend(),
        }
        if timing:
            d["wall_clock"] = {"build": round(self.build_seconds, 3),
                               "solve": round(self.solve_seconds, 3)}
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.as_dict(timing), indent=2) + "\n"


def lattice_bound(spec: LatticeSpec, pattern: FilterPattern | None = None,
                  window: int | None = None, budget: int = DEFAULT_BUDGET,
                  params: SolverParams | None = None,
                  automaton: LatticeAutomaton | None = None,
                  prove_invalid: bool = False):
    """Certified lower bound for the lattice; returns ``(report, automaton, bound)``.

    Bisection probes that the accelerated solve cannot certify are counted as
    failures without a divergence proof unless ``prove_invalid`` is set; the
    bound is unaffected, only the upper end of the bracket is unproven.
    """
    params = params or SolverParams()
    pattern = pattern if pattern is not None else preset_pattern(spec, "none")
    t0 = time.perf_counter()
    a = automaton or build_lattice_automaton(spec, pattern, window, budget)
    t1 = time.perf_counter()
    lb: LambdaBound = lambda_lower_bound(a, params, prove_invalid=prove_invalid)
    ok = lb.lam > 0 and check_certificate(a, lb.lam, lb.certificate)
    t2 = time.perf_counter()
    rep = BoundReport(spec.kind, pattern.name, pattern.content_hash(), window, a.num_classes,
                      a.num_transitions, lb.lam, lb.bracket, bool(ok), a.fingerprint(), params,
                      lb.probes, lb.undetermined, build_seconds=t1 - t0, solve_seconds=t2 - t1)
    return rep, a, lb


# -- finite patches ---------------------------------------------------------

def finite_patch(spec: LatticeSpec, radius: int) -> tuple[OrderedGraph, list[Site]]:
    """Ball of ``radius`` around the origin as an ordered graph (lattice order)."""
    sites = sorted(ball(spec, radius), key=spec.key)
    pos = {s: i for i, s in enumerate(sites)}
    edges = [(pos[s], pos[t]) for s in sites for t in spec.neighbors(s) if t in pos and pos[s] < pos[t]]
    return OrderedGraph.from_edges(len(sites), edges), sites


def patch_filters(spec: LatticeSpec, pattern: FilterPattern, sites: Sequence[Site]) -> list[frozenset[int]]:
    """All translates of the patterns lying entirely inside the patch."""
    pos = {s: i for i, s in enumerate(sites)}
    out = set()
    for p in pattern.patterns:
        for s in sites:
            for q in p:
                if spec.sublattice(q) != spec.sublattice(s):
                    continue
                t = _sub(s, q)
                members = [_add(t, x) for x in p]
                if all(m in pos for m in members):
                    out.add(frozenset(pos[m] for m in members))
    return sorted(out, key=lambda f: sorted(f))


def interior_walks(spec: LatticeSpec, radius: int, margin: int, max_len: int,
                   start: Site | None = None) -> Iterable[tuple[Site, ...]]:
    """All walks from ``start`` with at most ``max_len`` steps staying within ``radius - margin``."""
    inner = ball(spec, max(radius - margin, 0))
    start = spec.origin(0) if start is None else tuple(start)
    stack = [(start,)]
    while stack:
        w = stack.pop()
        yield w
        if len(w) - 1 < max_len:
            for t in spec.neighbors(w[-1]):
                if t in inner:
                    stack.append(w + (t,))


@dataclass
class PatchReport:
    lattice: str
    radius: int
    patch_vertices: int
    patch_filters: int
    walks_checked: int
    acceptance_mismatches: int
    lattice_bound: float
    patch_pipeline_bound: float | None
    patch_lambda_c: float | None

    @property
    def ok(self) -> bool:
        if self.acceptance_mismatches:
            return False
        if self.patch_lambda_c is not None and self.lattice_bound > self.patch_lambda_c + 1e-9:
            return False
        return True


def finite_patch_crosscheck(spec: LatticeSpec, pattern: FilterPattern, radius: int,
                            walk_len: int = 6, exact_cap: int = 22,
                            params: SolverParams | None = None) -> PatchReport:
    """Compare the lattice automaton with the finite-graph pipeline on a ball.

    Acceptance is compared on every walk that stays far enough inside the
    patch for all filters touching it to be fully inside the patch.  The
    lattice bound must not exceed the exact critical activity of the patch.
    """
    from .oracle import critical_lambda_exact
    from .walks import build_class_automaton

    g, sites = finite_patch(spec, radius)
    pos = {s: i for i, s in enumerate(sites)}
    fams = patch_filters(spec, pattern, sites)
    a = build_lattice_automaton(spec, pattern)
    span = pattern.max_span() if pattern.patterns else 0
    mismatches = checked = 0
    for s in range(spec.nsub):
        o = spec.origin(s)
        if o not in pos:
            continue
        for w in interior_walks(spec, radius, span, walk_len, o):
            checked += 1
            ref = is_walk_accepted([pos[x] for x in w], g, fams)
            if ref != a.accepts_sites(spec, w):
                mismatches += 1
    rep, _, _ = lattice_bound(spec, pattern, params=params, automaton=a)
    pb = None
    try:
        ga = build_class_automaton(g, fams)
        pb = lambda_lower_bound(ga, params or SolverParams()).lam
    except StateBudgetExceeded:
        pass
    lc = critical_lambda_exact(g) if g.n <= exact_cap else None
    return PatchReport(spec.kind, radius, g.n, len(fams), checked, mismatches, rep.lam, pb, lc)


def self_bounding_lattice_walks(spec: LatticeSpec, radius: int) -> list[tuple[Site, ...]]:
    """Self-bounding walks of the ball patch, as site sequences."""
    g, sites = finite_patch(spec, radius)
    return [tuple(sites[v] for v in w) for w, _ in enumerate_self_bounding(g)]
