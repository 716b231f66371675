"""Exact independent-set-polynomial oracle for small graphs.

Everything here is exponential in ``n`` and meant as ground truth for the
walk machinery: enumeration of independent sets, the vertex-deletion
recurrence, Shearer-region membership by a full subset scan, the ``ratio``
recurrence and bisection for the critical symmetric activity.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .graph import OrderedGraph, as_mask, mask_to_set

ENUM_CAP = 24
SUBSET_CAP = 22


class OracleCapExceeded(ValueError):
    pass


class OracleMismatch(AssertionError):
    pass


class DivergentRatio(ArithmeticError):
    """An intermediate ``ratio`` reached 1, so ``p`` is outside the region."""

    def __init__(self, vertex: int, subset: frozenset[int], value: float):
        super().__init__(f"ratio({vertex}, {sorted(subset)}) = {value!r} >= 1")
        self.vertex = vertex
        self.subset = subset
        self.value = value


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    witness: frozenset[int] | None = None
    table: np.ndarray | None = None


def _check_size(g: OrderedGraph, x: Sequence) -> None:
    if len(x) != g.n:
        raise ValueError(f"activity vector has length {len(x)}, graph has {g.n} vertices")


def _check_prob(p: Sequence[float]) -> None:
    for v in p:
        if not 0 <= v < 1:
            raise ValueError(f"activities must lie in [0, 1), got {v!r}")


def independent_sets(g: OrderedGraph):
    """Yield every independent set of ``g`` as a bitmask (including 0)."""
    masks = g.masks

    def rec(i, chosen, blocked):
        if i == g.n:
            yield chosen
            return
        yield from rec(i + 1, chosen, blocked)
        if not blocked >> i & 1:
            yield from rec(i + 1, chosen | 1 << i, blocked | masks[i])

    yield from rec(0, 0, 0)


def ind_poly_enumerate(g: OrderedGraph, x: Sequence) -> float:
    _check_size(g, x)
    if g.n > ENUM_CAP:
        raise OracleCapExceeded(f"enumeration limited to n <= {ENUM_CAP}")
    total = 0
    for s in independent_sets(g):
        term = 1
        i = 0
        while s:
            if s & 1:
                term *= x[i]
            s >>= 1
            i += 1
        total += term
    return total


def ind_poly_recurrence(g: OrderedGraph, x: Sequence, subset=None):
    """``Z_G(x; S)`` by memoised deletion of the highest vertex of ``S``.

    Works with floats or :class:`fractions.Fraction` entries.
    """
    _check_size(g, x)
    masks = g.masks
    full = (1 << g.n) - 1 if subset is None else as_mask(subset)

    @lru_cache(maxsize=None)
    def z(s):
        if s == 0:
            return 1
        i = s.bit_length() - 1
        rest = s & ~(1 << i)
        return z(rest) + x[i] * z(rest & ~masks[i])

    return z(full)


def ind_poly(g: OrderedGraph, x: Sequence, method: str = "both", rel_tol: float = 1e-12):
    """Independent set polynomial ``Z_G(x)``.

    ``method="both"`` evaluates by enumeration and by recurrence and raises
    :class:`OracleMismatch` if they disagree beyond ``rel_tol``.
    """
    if method == "recurrence":
        return ind_poly_recurrence(g, x)
    if method == "enumerate":
        return ind_poly_enumerate(g, x)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    a = ind_poly_enumerate(g, x)
    b = ind_poly_recurrence(g, x)
    scale = max(1.0, sum(abs(float(t)) for t in x))
    if abs(float(a) - float(b)) > rel_tol * max(abs(float(a)), 1.0) * scale:
        raise OracleMismatch(f"enumeration {a!r} != recurrence {b!r}")
    return b


def ind_poly_restricted(g: OrderedGraph, p: Sequence, s) -> float:
    """``Z_G(-p; S)``: variables outside ``S`` set to zero."""
    _check_size(g, p)
    return ind_poly_recurrence(g, [-v for v in p], s)


def restricted_table(g: OrderedGraph, p: Sequence, exact: bool = False):
    """Array of ``Z_G(-p; S)`` indexed by subset mask.

    With ``exact=True`` returns a list of :class:`Fraction` computed from the
    exact binary values of ``p``.
    """
    _check_size(g, p)
    if g.n > SUBSET_CAP:
        raise OracleCapExceeded(f"subset scan limited to n <= {SUBSET_CAP}")
    if exact:
        xs = [-Fraction(v) for v in p]
        z = [Fraction(1)] * (1 << g.n)
        for i in range(g.n):
            base = 1 << i
            keep = ~g.masks[i]
            for m in range(base):
                z[base + m] = z[m] + xs[i] * z[m & keep]
        return z
    nbr = np.array(g.masks, dtype=np.int64)
    return kernels.restricted_table(nbr, -np.asarray(p, dtype=np.float64))


def _min_violator(bad_masks) -> int:
    return min(bad_masks, key=lambda m: (bin(m).count("1"), m))


def shearer_membership_exact(g: OrderedGraph, p: Sequence, exact: bool = False,
                             keep_table: bool = False) -> MembershipVerdict:
    """Is ``Z_G(-p; S) > 0`` for every ``S``?

    A non-member comes with the violating ``S`` of smallest size (ties broken
    by mask value).
    """
    _check_size(g, p)
    _check_prob(p)
    table = restricted_table(g, p, exact=exact)
    if exact:
        bad = [m for m, v in enumerate(table) if v <= 0]
    else:
        bad = np.flatnonzero(~(table > 0)).tolist()
    if bad:
        return MembershipVerdict(False, mask_to_set(_min_violator(bad)),
                                 np.asarray(table, dtype=float) if keep_table else None)
    return MembershipVerdict(True, None, np.asarray(table, dtype=float) if keep_table else None)


def ratio(g: OrderedGraph, p: Sequence, i: int, s, _memo=None) -> float:
    """``1 - Z(-p; S + i) / Z(-p; S)`` through the ratio recurrence.

    The neighbours of ``i`` inside ``S`` are removed one at a time in
    ascending label order.  Raises :class:`DivergentRatio` if a ratio met
    inside the recursion is ``>= 1``; the returned top-level value itself may
    be ``>= 1``.
    """
    _check_size(g, p)
    smask = as_mask(s)
    if smask >> i & 1:
        raise ValueError(f"vertex {i} must not belong to S")
    masks = g.masks
    memo = {} if _memo is None else _memo

    def rec(v, sm):
        key = (v, sm)
        if key in memo:
            return memo[key]
        out = p[v]
        rest = sm
        nb = masks[v] & sm
        j = 0
        while nb:
            if nb & 1:
                rest &= ~(1 << j)
                sub = rec(j, rest)
                if sub >= 1:
                    raise DivergentRatio(j, mask_to_set(rest), sub)
                out /= 1 - sub
            nb >>= 1
            j += 1
        memo[key] = out
        return out

    return rec(i, smask)


def avoid_value(g: OrderedGraph, p: Sequence) -> float | None:
    """Minimal avoidance probability ``Z_G(-p)`` if ``p`` is in the region."""
    verdict = shearer_membership_exact(g, p, keep_table=True)
    if not verdict.member:
        return None
    return float(verdict.table[-1])


def critical_bracket(g: OrderedGraph, tol: float = 1e-9, weights=None) -> tuple[float, float]:
    """Bisection bracket ``(lo, hi)`` for ``sup{t : t * weights in region}``.

    ``lo`` is always a verified member; ``hi - lo < tol``.  ``weights``
    defaults to all ones, and the search is capped so that ``t * w < 1``.
    """
    w = np.ones(g.n) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if g.n == 0 or not np.any(w > 0):
        return 1.0, 1.0
    cap = 1.0 / float(w.max())
    nbr = np.array(g.masks, dtype=np.int64)

    def member(t):
        if t * w.max() >= 1:
            return False
        return bool(np.all(kernels.restricted_table(nbr, -t * w) > 0))

    lo, hi = 0.0, cap
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def critical_lambda_exact(g: OrderedGraph, tol: float = 1e-9) -> float:
    """Largest verified symmetric activity, within ``tol`` below ``lambda_c``."""
    if g.n > SUBSET_CAP:
        raise OracleCapExceeded(f"subset scan limited to n <= {SUBSET_CAP}")
    return critical_bracket(g, tol)[0]
