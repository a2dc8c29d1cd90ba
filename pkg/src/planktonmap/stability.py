"""Fixed-point classification and the critical net-gain parameter."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (
    ModelParams,
    PlanktonState,
    boundary_fixed_points,
    jacobian,
    positive_fixed_point,
)
from .polyroots import real_cubic_roots

__all__ = [
    "StabilityClass",
    "FixedPointReport",
    "NoCriticalParameter",
    "CriticalGamma",
    "jury_classify",
    "classify_moduli",
    "classify_E0",
    "classify_E1",
    "classify_positive",
    "p_q",
    "critical_gamma",
    "solve_critical_gamma",
    "critical_gamma_cubic",
]

DEFAULT_TOL = 1e-9


class StabilityClass(enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    SADDLE = "saddle"
    NON_HYPERBOLIC = "nonhyperbolic"


@dataclass(frozen=True)
class FixedPointReport:
    point: PlanktonState
    classification: StabilityClass
    eigenvalues: tuple[complex, complex]
    p_value: float | None = None
    q_value: float | None = None


class NoCriticalParameter(ValueError):
    """Raised when q(u) = 1 has no admissible solution in gamma."""

    def __init__(self, message: str, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


def classify_moduli(eigenvalues, tol: float = DEFAULT_TOL) -> StabilityClass:
    mods = [abs(lam) for lam in eigenvalues]
    if any(abs(m - 1.0) <= tol for m in mods):
        return StabilityClass.NON_HYPERBOLIC
    if all(m < 1.0 for m in mods):
        return StabilityClass.ATTRACTING
    if all(m > 1.0 for m in mods):
        return StabilityClass.REPELLING
    return StabilityClass.SADDLE


def _quadratic_eigs(B: float, C: float) -> tuple[complex, complex]:
    disc = B * B - 4.0 * C
    if disc >= 0:
        s = math.sqrt(disc)
        return complex(0.5 * (-B - s)), complex(0.5 * (-B + s))
    s = math.sqrt(-disc)
    return complex(-0.5 * B, -0.5 * s), complex(-0.5 * B, 0.5 * s)


def jury_classify(B: float, C: float, tol: float = DEFAULT_TOL) -> StabilityClass:
    """Locate the roots of lambda^2 + B lambda + C relative to the unit circle.

    Uses the sign tests on F(1), F(-1) and C.  When F(1) <= tol the sign tests
    do not apply and the roots are computed directly.
    """
    f_plus = 1.0 + B + C
    if f_plus <= tol:
        return classify_moduli(_quadratic_eigs(B, C), tol)
    f_minus = 1.0 - B + C
    if abs(f_minus) <= tol:
        return StabilityClass.NON_HYPERBOLIC
    if f_minus < 0:
        return StabilityClass.SADDLE
    # F(1) > 0 and F(-1) > 0 force -2 < B < 2 whenever C is near 1
    if abs(C - 1.0) <= tol:
        return StabilityClass.NON_HYPERBOLIC
    return StabilityClass.ATTRACTING if C < 1.0 else StabilityClass.REPELLING


def classify_E0(params: ModelParams, tol: float = DEFAULT_TOL) -> FixedPointReport:
    r = params.r
    if abs(r - 2.0) <= tol:
        cls = StabilityClass.NON_HYPERBOLIC
    elif r < 2.0:
        cls = StabilityClass.SADDLE
    else:
        cls = StabilityClass.REPELLING
    return FixedPointReport(boundary_fixed_points()[0], cls, (complex(2.0), complex(1.0 - r)))


def classify_E1(params: ModelParams, tol: float = DEFAULT_TOL) -> FixedPointReport:
    r, c, g = params.r, params.c, params.gamma
    lo, hi = (r - 2.0) * (1.0 + c), r * (1.0 + c)
    if abs(g - lo) <= tol or abs(g - hi) <= tol:
        cls = StabilityClass.NON_HYPERBOLIC
    elif lo < g < hi:
        cls = StabilityClass.ATTRACTING
    else:
        cls = StabilityClass.SADDLE
    lam2 = g / (1.0 + c) + 1.0 - r
    return FixedPointReport(boundary_fixed_points()[1], cls, (complex(0.0), complex(lam2)))


def p_q(params: ModelParams, u: float) -> tuple[float, float]:
    """Trace p and determinant q of the Jacobian at the positive fixed point with abscissa u."""
    r, c, h = params.r, params.c, params.h
    uh = u if h == 1 else u * u
    den = 1.0 + c * uh
    p = 1.0 + (1.0 - u) * (2.0 - h + 2.0 * c * uh) / den
    q = (1.0 - u) * (2.0 - h + r * h + 2.0 * c * uh) / den
    return p, q


def classify_positive(params: ModelParams, tol: float = DEFAULT_TOL) -> FixedPointReport | None:
    fp = positive_fixed_point(params)
    if fp is None:
        return None
    p, q = p_q(params, fp.u)
    if abs(q - 1.0) <= tol:
        cls = StabilityClass.NON_HYPERBOLIC
    elif q < 1.0:
        cls = StabilityClass.ATTRACTING
    else:
        cls = StabilityClass.REPELLING
    return FixedPointReport(fp, cls, jacobian(params, fp).eigenvalues(), p, q)


def critical_gamma_cubic(r: float, c: float) -> tuple[float, float, float, float]:
    """Coefficients (a3, a2, a1, a0) of the cubic in gamma equivalent to q(u) = 1 for h = 2."""
    a3 = (2.0 * r - 1.0) ** 2
    a2 = -(r * c * (2.0 * r - 1.0) * (6.0 * r - 5.0) + 4.0 * r ** 3)
    a1 = 4.0 * r * r * c * (r - 1.0) * (3.0 * r * c - 2.0 * c + 2.0 * r)
    a0 = -4.0 * r ** 3 * c * c * (r - 1.0) ** 2 * (c + 1.0)
    return a3, a2, a1, a0


@dataclass(frozen=True)
class CriticalGamma:
    gamma0: float
    roots: tuple[float, ...]
    admissible: tuple[float, ...]


def _closed_form_h1(r: float, c: float) -> float:
    return 0.5 * (1.0 - c + r + 2.0 * r * c + math.sqrt((1.0 - c) ** 2 + 2.0 * r + 6.0 * r * c + r * r))


def solve_critical_gamma(r: float, c: float, h: int, filter_tol: float = 1e-7) -> CriticalGamma:
    """Solve q(u(gamma)) = 1 for gamma, reporting every candidate root.

    For h = 1 the closed form is used.  For h = 2 all real roots of the cubic
    are kept if gamma > r(1+c), the fixed point has u in (0, 1) and
    |q - 1| <= filter_tol; the smallest survivor is returned.
    """
    if r <= 0 or c <= 0:
        raise ValueError("r and c must be positive")
    if h == 1:
        g = _closed_form_h1(r, c)
        return CriticalGamma(g, (g,), (g,))
    if h != 2:
        raise ValueError(f"h must be 1 or 2, got {h}")

    roots = tuple(real_cubic_roots(*critical_gamma_cubic(r, c)))
    ok = []
    for g in roots:
        if not g > r * (1.0 + c):
            continue
        params = ModelParams(r, c, g, 2)
        fp = positive_fixed_point(params)
        if fp is None or not 0.0 < fp.u < 1.0:
            continue
        if abs(p_q(params, fp.u)[1] - 1.0) <= filter_tol:
            ok.append(g)
    if not ok:
        raise NoCriticalParameter(
            f"no critical parameter for r={r}, c={c}, h=2 (real roots: {list(roots)})", roots
        )
    ok.sort()
    return CriticalGamma(ok[0], roots, tuple(ok))


def critical_gamma(r: float, c: float, h: int) -> float:
    return solve_critical_gamma(r, c, h).gamma0
