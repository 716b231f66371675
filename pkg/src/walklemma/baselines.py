"""Closed-form symmetric bounds on d-regular graphs and published reference values."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import minimize_scalar

ASYMMETRIC = "AsymmetricLLL"
NONBACKTRACKING = "NonBacktracking"

LATTICE_DEGREE = {"square": 4, "cubic": 6, "hexagonal": 3}

# Published comparison columns, kept only as constants for tables.
REFERENCE = {
    "cluster": {"square": 0.0896, "cubic": 0.0601, "hexagonal": 0.1190},
    "decomposition": {"square": 0.1130, "cubic": 0.0702, "hexagonal": 0.1481},
    "published": {"square": 0.1191, "cubic": 0.0743, "hexagonal": 0.1542},
    "conjectured": {"square": 0.1193, "cubic": 0.0744, "hexagonal": 0.1547},
}
CONJECTURED_FULL = {"square": 0.11933888188}


@dataclass(frozen=True)
class SymmetricBound:
    method: str
    degree: int
    value: float

    def __post_init__(self):
        if not 0 < self.value < 1:
            raise ValueError("symmetric bound must lie in (0, 1)")


def asymmetric_symmetric_exact(d: int) -> Fraction:
    """``max_r r (1 - r)^d = d^d / (d + 1)^(d + 1)``."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return Fraction(d ** d, (d + 1) ** (d + 1))


def nonbacktracking_symmetric_exact(d: int) -> Fraction:
    """The asymmetric optimum at effective degree ``d - 1``."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    return Fraction((d - 1) ** (d - 1), d ** d)


def asymmetric_symmetric_bound(d: int) -> float:
    return float(asymmetric_symmetric_exact(d))


def nonbacktracking_symmetric_bound(d: int) -> float:
    return float(nonbacktracking_symmetric_exact(d))


def improved_product_symmetric_bound(d: int) -> float:
    """Numerical ``max_r r ((1 - r) / (1 - r^2))^d = max_r r / (1 + r)^d``.

    The pairwise-corrected product condition on a d-regular graph with all
    ``r_i = r``; it should agree with :func:`nonbacktracking_symmetric_bound`.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    res = minimize_scalar(lambda r: -r * ((1 - r) / (1 - r * r)) ** d,
                          bounds=(0.0, 1.0 - 1e-12), method="bounded",
                          options={"xatol": 1e-12})
    return float(-res.fun)


def symmetric_bound(method: str, d: int) -> SymmetricBound:
    if method == ASYMMETRIC:
        return SymmetricBound(method, d, asymmetric_symmetric_bound(d))
    if method == NONBACKTRACKING:
        return SymmetricBound(method, d, nonbacktracking_symmetric_bound(d))
    raise ValueError(f"unknown method {method!r}")
