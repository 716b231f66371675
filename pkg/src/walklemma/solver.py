"""Fixed-point validity certificates on class automata.

For a class automaton with terminal activities ``w_c`` the validity system
is ``w_c <= r_c * prod_{c' in succ(c)} (1 - r_c')`` with ``r in [0, 1)``.
Iterating ``r <- w / prod (1 - r_succ)`` from zero increases monotonically
towards the least solution; reaching 1 proves no solution exists.  A
solution is accepted only after :func:`check_certificate` has re-checked
every inequality.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .walks import ClassAutomaton

log = logging.getLogger(__name__)

MAX_ITER = 10_000
MARGIN = 1e-12
INFLATION = 1e-9
BISECT_TOL = 1e-6
ACCEL_ITER = 400
ACCEL_MEMORY = 8


class Status(enum.Enum):
    VALID = "CertifiedValid"
    INVALID = "CertifiedInvalid"
    UNDETERMINED = "Undetermined"


@dataclass
class ValidityVerdict:
    status: Status
    certificate: np.ndarray | None = None
    divergence: tuple[int, int, float] | None = None  # (iteration, class, value)
    iterations: int = 0
    converged: bool = False
    lower: np.ndarray | None = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        return self.status is Status.VALID


@dataclass
class SolverParams:
    max_iter: int = MAX_ITER
    margin: float = MARGIN
    inflation: float = INFLATION
    tol: float = BISECT_TOL
    accel_iter: int = ACCEL_ITER

    def __post_init__(self):
        if self.max_iter <= 0 or self.margin <= 0 or self.inflation <= 0 or self.tol <= 0:
            raise ValueError("solver parameters must be positive")
        if self.accel_iter < 0:
            raise ValueError("accel_iter must be non-negative")


def class_weights(a: ClassAutomaton, p) -> np.ndarray:
    """Activity of each class's terminal; a scalar means symmetric activities."""
    if np.ndim(p) == 0:
        return np.full(a.num_classes, float(p))
    p = np.asarray(p, dtype=np.float64)
    if len(a.terminal) and a.terminal.max() >= len(p):
        raise ValueError("activity vector shorter than the automaton's terminal labels")
    return p[a.terminal]


def iterate_once(a: ClassAutomaton, p, r) -> np.ndarray:
    """One Jacobi step; diverging components come back as 1.0."""
    out, _ = kernels.iterate(a.indptr, a.succ, class_weights(a, p), np.asarray(r, dtype=np.float64))
    return out


def certificate_slack(a: ClassAutomaton, p, r) -> np.ndarray:
    return kernels.certificate_slack(a.indptr, a.succ, class_weights(a, p),
                                     np.asarray(r, dtype=np.float64))


def check_certificate(a: ClassAutomaton, p, r, exact: bool = False) -> bool:
    """Does ``r`` satisfy every class inequality, with all ``r_c in [0, 1)``?

    The float check subtracts a bound on the accumulated rounding error
    before comparing, so ``True`` holds for the real-valued inequality.
    ``exact=True`` evaluates with rationals instead.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (a.num_classes,):
        return False
    if not exact:
        slack = certificate_slack(a, p, r)
        return bool(np.all(slack >= 0))
    w = class_weights(a, p)
    rf = [Fraction(float(v)) for v in r]
    for c in range(a.num_classes):
        if not 0 <= rf[c] < 1:
            return False
        rhs = rf[c]
        for d in a.successors(c):
            rhs *= 1 - rf[int(d)]
        if Fraction(float(w[c])) > rhs:
            return False
    return True


def anderson_fixed_point(a: ClassAutomaton, w: np.ndarray, iters: int,
                         memory: int = ACCEL_MEMORY, rtol: float = 1e-13,
                         x0: np.ndarray | None = None, stall: int = 40) -> np.ndarray | None:
    """Anderson-accelerated iteration towards the least fixed point.

    Iterates are not monotone, so the result is only a candidate: it is
    ``None`` if an evaluation left ``[0, 1)``, or if the residual failed to
    halve within ``stall`` steps.
    """
    n = a.num_classes
    if n == 0:
        return np.zeros(0)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    fx, bad = kernels.iterate(a.indptr, a.succ, w, x)
    if bad:
        return None
    g = fx - x
    dx = np.empty((memory, n))
    dg = np.empty((memory, n))
    k = 0
    best, since = np.inf, 0
    for _ in range(iters):
        res = float(np.max(np.abs(g)))
        if res <= rtol * float(np.max(x)):
            return x
        if res < 0.5 * best:
            best, since = res, 0
        else:
            since += 1
            if since > stall:
                return None
        if k:
            m = min(k, memory)
            d = dg[:m]
            gam = np.linalg.lstsq(d @ d.T, d @ g, rcond=None)[0]
            x_new = x + g - gam @ dx[:m] - gam @ d
        else:
            x_new = x + g
        np.clip(x_new, 0.0, 1.0 - 1e-14, out=x_new)
        fx, bad = kernels.iterate(a.indptr, a.succ, w, x_new)
        if bad:
            return None
        g_new = fx - x_new
        col = k % memory
        np.subtract(x_new, x, out=dx[col])
        np.subtract(g_new, g, out=dg[col])
        x, g = x_new, g_new
        k += 1
    return None


def decide_validity(a: ClassAutomaton, p, params: SolverParams | None = None,
                    warm_start: np.ndarray | None = None,
                    prove_invalid: bool = True) -> ValidityVerdict:
    """Certify ``p`` as valid or invalid for ``a`` when possible.

    1. Solve the system with every activity multiplied by ``1 + inflation``
       by Anderson acceleration.  Its fixed point satisfies the system for
       ``p`` with relative slack ``inflation``; it is accepted only if
       :func:`check_certificate` passes.
    2. Otherwise iterate monotonically from zero (or from ``warm_start``,
       which must be a sub-solution for ``p``).  A component reaching 1 is a
       proof of invalidity.  If the iteration converges, continue it at the
       inflated activities until the relative change is below
       ``inflation / 4`` and check the result.

    ``prove_invalid=False`` skips step 2.
    """
    params = params or SolverParams()
    w = class_weights(a, p)
    n = a.num_classes
    if np.any(w < 0) or np.any(w >= 1):
        raise ValueError("activities must lie in [0, 1)")
    w_hi = w * (1.0 + params.inflation)
    if np.any(w_hi >= 1):
        return ValidityVerdict(Status.UNDETERMINED)
    if params.accel_iter:
        cand = anderson_fixed_point(a, w_hi, params.accel_iter)
        if cand is not None:
            cand = np.minimum(cand, 1.0 - params.margin)
            if check_certificate(a, p, cand):
                return ValidityVerdict(Status.VALID, certificate=cand, converged=True)
    if not prove_invalid:
        return ValidityVerdict(Status.UNDETERMINED)
    r0 = np.zeros(n) if warm_start is None else np.asarray(warm_start, dtype=np.float64)
    r, it, st, _, c = kernels.run_iteration(a.indptr, a.succ, w, r0, params.max_iter, params.margin)
    if st < 0:
        return ValidityVerdict(Status.INVALID, divergence=(it, c, float(r[c])), iterations=it)
    lower = r
    r_hi, it2, st2, _, _ = kernels.run_iteration(a.indptr, a.succ, w_hi, r, params.max_iter,
                                              params.inflation / 4)
    total = it + it2
    if st2 != 1:
        return ValidityVerdict(Status.UNDETERMINED, iterations=total, lower=lower)
    cand = np.minimum(r_hi, 1.0 - params.margin)
    if check_certificate(a, p, cand):
        return ValidityVerdict(Status.VALID, certificate=cand, iterations=total,
                               converged=st == 1, lower=lower)
    return ValidityVerdict(Status.UNDETERMINED, iterations=total, lower=lower)


@dataclass
class LambdaBound:
    lam: float
    certificate: np.ndarray
    bracket: tuple[float, float]
    probes: int
    undetermined: int
    iterations: int

    @property
    def limited_by_undetermined(self) -> bool:
        return self.undetermined > 0


def lambda_lower_bound(a: ClassAutomaton, params: SolverParams | None = None,
                       lo: float = 0.0, hi: float = 1.0,
                       prove_invalid: bool = True) -> LambdaBound:
    """Largest certified symmetric activity found by bisection.

    Every accepted probe carries a checked certificate; ``Undetermined``
    probes are treated as invalid, so the result stays a lower bound.
    Probes are warm-started from the last valid probe's iterate, which is a
    sub-solution for any larger activity.  With ``prove_invalid=False`` a
    probe that the accelerated solve cannot certify is not chased further.
    """
    params = params or SolverParams()
    best = np.zeros(a.num_classes)
    warm = np.zeros(a.num_classes)
    if lo > 0:
        v = decide_validity(a, lo, params)
        if not v.valid:
            raise ValueError(f"lower end {lo} is not certified valid")
        best = v.certificate
        warm = v.lower if v.lower is not None else warm
    probes = undetermined = iters = 0
    while hi - lo > params.tol:
        mid = 0.5 * (lo + hi)
        v = decide_validity(a, mid, params, warm_start=warm, prove_invalid=prove_invalid)
        probes += 1
        iters += v.iterations
        log.debug("probe %.9f -> %s (%d iterations)", mid, v.status.value, v.iterations)
        if v.valid:
            lo, best = mid, v.certificate
            if v.lower is not None:
                warm = v.lower
        else:
            undetermined += v.status is Status.UNDETERMINED
            hi = mid
    return LambdaBound(lo, best, (lo, hi), probes, undetermined, iters)
