"""Supermodular set functions that factorize along a dependency graph.

A table holds ``f(S)`` for every subset mask ``S`` of ``[n]``.  The checks
here are full scans and are limited to ``n <= 16``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import OrderedGraph, as_mask, mask_to_set
from .oracle import critical_bracket, ind_poly_restricted, restricted_table, shearer_membership_exact

MAX_N = 16
TOL = 1e-9
MAX_SHARED = 16


class PreconditionFailed(ValueError):
    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"precondition failed: {check}" + (f" ({detail})" if detail else ""))
        self.check = check


class RegionNotViolated(ValueError):
    pass


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SetFunctionTable:
    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise ValueError(f"tables are limited to n <= {MAX_N}")
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got {v.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("set function values must be finite and non-negative")
        object.__setattr__(self, "values", v)

    def __call__(self, s) -> float:
        return float(self.values[as_mask(s)])

    @classmethod
    def from_function(cls, n: int, fn) -> "SetFunctionTable":
        return cls(n, np.array([fn(mask_to_set(m)) for m in range(1 << n)], dtype=np.float64))


@dataclass(frozen=True)
class SupermodularWitness:
    """``f(S + i) - f(S) > f(T + i) - f(T)`` with ``T = S + j``."""

    i: int
    s: frozenset[int]
    t: frozenset[int]
    gap: float


def _masks(n):
    return np.arange(1 << n, dtype=np.int64)


def is_supermodular(t: SetFunctionTable, tol: float = TOL):
    """``(True, None)`` or ``(False, witness)``.

    Checks covering pairs ``T = S + j`` only, which implies every ``S <= T``
    by telescoping.  The witness has the smallest ``(i, j, S)``.
    """
    f = t.values
    m = _masks(t.n)
    for i in range(t.n):
        bi = 1 << i
        for j in range(t.n):
            if j == i:
                continue
            bj = 1 << j
            s = m[(m & (bi | bj)) == 0]
            lhs = f[s | bi] - f[s]
            rhs = f[s | bi | bj] - f[s | bj]
            bad = np.flatnonzero(lhs > rhs + tol)
            if len(bad):
                k = bad[0]
                sm = int(s[k])
                return False, SupermodularWitness(i, mask_to_set(sm), mask_to_set(sm | bj),
                                                  float(lhs[k] - rhs[k]))
    return True, None


def factorizes(t: SetFunctionTable, g: OrderedGraph, p: Sequence[float], tol: float = TOL):
    """``f(S + i) >= (1 - p_i) f(S)`` for all ``S`` avoiding ``i`` and its neighbours.

    Returns ``(True, None)`` or ``(False, (i, S))`` for the first violation.
    """
    if g.n != t.n or len(p) != t.n:
        raise ValueError("sizes of table, graph or activities differ")
    f = t.values
    m = _masks(t.n)
    for i in range(t.n):
        closed = g.masks[i] | 1 << i
        s = m[(m & closed) == 0]
        bad = np.flatnonzero(f[s | 1 << i] < (1 - p[i]) * f[s] - tol)
        if len(bad):
            return False, (i, mask_to_set(int(s[bad[0]])))
    return True, None


def _check_bound_preconditions(t: SetFunctionTable, g: OrderedGraph, p, tol: float) -> None:
    if g.n != t.n or len(p) != t.n:
        raise ValueError("sizes of table, graph or activities differ")
    if t.values[0] <= 0:
        raise PreconditionFailed("f(empty) > 0")
    verdict = shearer_membership_exact(g, p)
    if not verdict.member:
        raise PreconditionFailed("activity vector in the region",
                                 f"Z <= 0 on {sorted(v + 1 for v in verdict.witness)}")
    ok, w = is_supermodular(t, tol)
    if not ok:
        raise PreconditionFailed("supermodular", f"i={w.i + 1}")
    ok, w2 = factorizes(t, g, p, tol)
    if not ok:
        raise PreconditionFailed("factorizes", f"i={w2[0] + 1}")


def supermodular_lower_bound(t: SetFunctionTable, g: OrderedGraph, p: Sequence[float], x,
                             tol: float = TOL) -> tuple[float, bool]:
    """``f(0) * Z_G(-p; x)`` and whether the table respects it at ``x``."""
    _check_bound_preconditions(t, g, p, tol)
    xm = as_mask(x)
    bound = float(t.values[0]) * float(ind_poly_restricted(g, p, xm))
    return bound, bool(t.values[xm] >= bound - tol)


def supermodular_lower_bounds(t: SetFunctionTable, g: OrderedGraph, p: Sequence[float],
                              tol: float = TOL) -> tuple[np.ndarray, np.ndarray]:
    """The bound for every subset at once: ``(bounds, holds)`` indexed by mask."""
    _check_bound_preconditions(t, g, p, tol)
    bounds = float(t.values[0]) * np.asarray(restricted_table(g, np.asarray(p, dtype=float)))
    return bounds, t.values >= bounds - tol


def extremal_construction(g: OrderedGraph, p: Sequence[float], tol: float = 1e-12) -> tuple[float, SetFunctionTable]:
    """Scale ``p`` down to the region's boundary and tabulate ``Z_G(-lam p; .)``.

    Returns ``(lam, table)``; ``lam`` is the largest verified member scale,
    within ``tol`` of the boundary, so the table is positive with minimum
    close to zero.
    """
    p = np.asarray(p, dtype=np.float64)
    if len(p) != g.n:
        raise ValueError("activity vector length does not match the graph")
    if g.n > MAX_N:
        raise ValueError(f"tables are limited to n <= {MAX_N}")
    if shearer_membership_exact(g, p).member:
        raise RegionNotViolated("activity vector is inside the region")
    lam, _ = critical_bracket(g, tol=tol, weights=p)
    lam = min(lam, 1.0)
    table = np.asarray(restricted_table(g, lam * p), dtype=np.float64)
    return lam, SetFunctionTable(g.n, np.maximum(table, 0.0))


def generate_event_instance(g: OrderedGraph, p: Sequence[float], seed: int = 0) -> SetFunctionTable:
    """Avoidance table of an explicit event system with dependency graph ``g``.

    Every edge carries a shared biased bit and every event a private uniform
    variable.  Event ``i`` happens when its private variable falls below a
    threshold ``h_i`` that depends on the bits of its incident edges; the
    thresholds are random with mean exactly ``p_i``, so the marginals are
    ``p`` and events with disjoint neighbourhoods are independent.
    """
    p = np.asarray(p, dtype=np.float64)
    if len(p) != g.n:
        raise ValueError("activity vector length does not match the graph")
    if np.any(p < 0) or np.any(p >= 1):
        raise ValueError("activities must lie in [0, 1)")
    edges = g.edges()
    if len(edges) > MAX_SHARED:
        raise ValueError(f"at most {MAX_SHARED} edges supported")
    rng = np.random.default_rng(seed)
    m = len(edges)
    q = rng.uniform(0.2, 0.8, size=m)
    configs = ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(bool)
    prob = np.prod(np.where(configs, q, 1 - q), axis=1)
    incident = [[k for k, e in enumerate(edges) if i in e] for i in range(g.n)]
    # thresholds h[c, i] for configuration c
    h = np.empty((len(configs), g.n))
    for i in range(g.n):
        inc = incident[i]
        if not inc:
            h[:, i] = p[i]
            continue
        local = np.zeros(len(configs), dtype=np.int64)
        for b, k in enumerate(inc):
            local |= configs[:, k].astype(np.int64) << b
        raw = rng.uniform(-1.0, 1.0, size=1 << len(inc))[local]
        cen = raw - prob @ raw
        span = np.max(np.abs(cen))
        scale = min(p[i], 1 - p[i]) / span if span > 1e-9 else 0.0
        h[:, i] = np.clip(p[i] + scale * cen, 0.0, 1.0)
    # avoid[c, S] = prod_{j in S} (1 - h[c, j]) built by doubling
    avoid = np.ones((len(configs), 1))
    for j in range(g.n):
        avoid = np.concatenate([avoid, avoid * (1 - h[:, j])[:, None]], axis=1)
    return SetFunctionTable(g.n, np.maximum(prob @ avoid, 0.0))


def lll_radii(g: OrderedGraph, p: Sequence[float], max_iter: int = 100_000,
              tol: float = 1e-14) -> np.ndarray | None:
    """Least ``r`` with ``p_i <= r_i prod_{j ~ i} (1 - r_j)`` if the iteration finds one."""
    target = np.asarray(p, dtype=np.float64)
    p = target * (1 + 1e-9)
    r = np.zeros(g.n)
    for _ in range(max_iter):
        new = np.array([p[i] / np.prod([1 - r[j] for j in g.adj[i]]) for i in range(g.n)])
        if np.any(new >= 1) or not np.all(np.isfinite(new)):
            return None
        if np.all(np.abs(new - r) <= tol * np.maximum(new, 1e-300)):
            r = new
            break
        r = new
    else:
        return None
    ok = all(target[i] <= r[i] * np.prod([1 - r[j] for j in g.adj[i]]) for i in range(g.n))
    return r if ok else None


def product_lower_bound_holds(t: SetFunctionTable, r: np.ndarray, tol: float = TOL) -> bool:
    """``f(S) >= f(0) prod_{i in S} (1 - r_i)`` on every subset."""
    prod = np.ones(1)
    for i in range(t.n):
        prod = np.concatenate([prod, prod * (1 - r[i])])
    return bool(np.all(t.values >= t.values[0] * prod - tol))


# -- table files -------------------------------------------------------------

def parse_table(text: str) -> SetFunctionTable:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise TableFormatError("empty table file")
    try:
        n = int(lines[0])
    except ValueError:
        raise TableFormatError("first line must be n") from None
    if not 0 <= n <= MAX_N:
        raise TableFormatError(f"n must be between 0 and {MAX_N}")
    values = np.full(1 << n, np.nan)
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise TableFormatError(f"bad line {ln!r}")
        try:
            mask, val = int(parts[0], 16), float(parts[1])
        except ValueError:
            raise TableFormatError(f"bad line {ln!r}") from None
        if not 0 <= mask < 1 << n:
            raise TableFormatError(f"mask {parts[0]} out of range")
        if not np.isnan(values[mask]):
            raise TableFormatError(f"duplicate mask {parts[0]}")
        values[mask] = val
    if np.any(np.isnan(values)):
        raise TableFormatError(f"expected {1 << n} entries")
    try:
        return SetFunctionTable(n, values)
    except ValueError as exc:
        raise TableFormatError(str(exc)) from None


def format_table(t: SetFunctionTable) -> str:
    return f"{t.n}\n" + "".join(f"{m:x} {v!r}\n" for m, v in enumerate(t.values.tolist()))


def read_table(path: str | Path) -> SetFunctionTable:
    return parse_table(Path(path).read_text())
