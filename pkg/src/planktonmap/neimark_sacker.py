"""Neimark-Sacker analysis at the positive fixed point.

Pipeline: shift the fixed point to the origin, Taylor-expand the map to third
order at the critical gamma, move to the eigenbasis of the linear part and
evaluate the discriminating quantity L whose sign decides whether the closed
invariant curve born at gamma0 attracts (L < 0) or repels (L > 0).
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from .model import ModelParams, PlanktonState, positive_fixed_point, step_uv
from .stability import critical_gamma

__all__ = [
    "TaylorCoeffs",
    "NormalForm",
    "NSDirection",
    "NSReport",
    "taylor_coeffs",
    "taylor_coeffs_fd",
    "fd_taylor_table",
    "transversality",
    "normal_form",
    "discriminating_quantity",
    "lyapunov_quantity",
]


@dataclass(frozen=True)
class TaylorCoeffs:
    """Third-order expansion of the shifted map; a02, a03, a12, b02, b03, b12 vanish."""

    a10: float
    a01: float
    a20: float
    a11: float
    a30: float
    a21: float
    b10: float
    b01: float
    b20: float
    b11: float
    b30: float
    b21: float

    def nonlinear(self, x, y):
        """Quadratic and cubic part H(x, y) of the expansion."""
        hx = self.a20 * x * x + self.a11 * x * y + self.a30 * x ** 3 + self.a21 * x * x * y
        hy = self.b20 * x * x + self.b11 * x * y + self.b30 * x ** 3 + self.b21 * x * x * y
        return hx, hy


def taylor_coeffs(params: ModelParams, fixed_point: PlanktonState) -> TaylorCoeffs:
    """Closed-form Taylor coefficients; ``params.gamma`` is taken as gamma0."""
    r, c, g, h = params.r, params.c, params.gamma, params.h
    u = fixed_point.u
    uh = u if h == 1 else u * u
    den = 1.0 + c * uh
    k = 1.0 - h + c * uh + h * c * uh
    big = 2.0 * den ** 2 + 3.0 * h * (c * c * uh * uh - 1.0) + h * h * (1.0 - 4.0 * c * uh + c * c * uh * uh)
    uhm1 = 1.0 if h == 1 else u
    uhm2 = 1.0 / u if h == 1 else 1.0

    s20 = h * (1.0 - u) * k / (2.0 * u * den ** 2)
    s11 = h * uhm1 / den ** 2
    s30 = h * (1.0 - u) * big / (6.0 * u * u * den ** 3)
    s21 = h * uhm2 * k / (2.0 * den ** 3)
    return TaylorCoeffs(
        a10=(1.0 - u) * (2.0 - h + 2.0 * c * uh) / den,
        a01=-r / g,
        a20=-1.0 + s20,
        a11=-s11,
        a30=-s30,
        a21=s21,
        b10=g * h * (1.0 - u) / den,
        b01=1.0,
        b20=-g * s20,
        b11=g * s11,
        b30=g * s30,
        b21=-g * s21,
    )


def fd_taylor_table(
    params: ModelParams,
    fixed_point: PlanktonState,
    h1: float = 1e-6,
    h2: float = 1e-4,
    h3: float = 1e-3,
) -> dict[str, float]:
    """All 18 coefficients a_ij, b_ij (i + j <= 3) from central differences of the map.

    Independent of :func:`taylor_coeffs`: only evaluates the map itself.
    """
    u0, v0 = fixed_point.u, fixed_point.v
    r, c, g, hh = params.r, params.c, params.gamma, params.h

    def phi(x, y):
        a, b = step_uv(u0 + x, v0 + y, r, c, g, hh)
        return a - u0, b - v0

    def combo(weights):
        # weights: list of (w, x, y); returns the weighted sum for both components
        sx = sy = 0.0
        for w, x, y in weights:
            fx, fy = phi(x, y)
            sx += w * fx
            sy += w * fy
        return sx, sy

    e1, e2, e3 = h1, h2, h3
    stencils = {
        "10": [(1 / (2 * e1), e1, 0), (-1 / (2 * e1), -e1, 0)],
        "01": [(1 / (2 * e1), 0, e1), (-1 / (2 * e1), 0, -e1)],
        "20": [(0.5 / e2 ** 2, e2, 0), (-1.0 / e2 ** 2, 0, 0), (0.5 / e2 ** 2, -e2, 0)],
        "02": [(0.5 / e2 ** 2, 0, e2), (-1.0 / e2 ** 2, 0, 0), (0.5 / e2 ** 2, 0, -e2)],
        "11": [(s / (4 * e2 ** 2), sx * e2, sy * e2)
               for sx, sy, s in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))],
        "30": [(w / (12 * e3 ** 3), k * e3, 0) for w, k in ((1, 2), (-2, 1), (2, -1), (-1, -2))],
        "03": [(w / (12 * e3 ** 3), 0, k * e3) for w, k in ((1, 2), (-2, 1), (2, -1), (-1, -2))],
        # (1/2) d3/dx2dy: y-central difference of the x second difference
        "21": [(wx * wy / (4 * e3 ** 3), kx * e3, ky * e3)
               for wx, kx in ((1, 1), (-2, 0), (1, -1)) for wy, ky in ((1, 1), (-1, -1))],
        "12": [(wx * wy / (4 * e3 ** 3), kx * e3, ky * e3)
               for wy, ky in ((1, 1), (-2, 0), (1, -1)) for wx, kx in ((1, 1), (-1, -1))],
    }
    out = {}
    for key, weights in stencils.items():
        ax, by = combo(weights)
        out["a" + key] = ax
        out["b" + key] = by
    return out


def taylor_coeffs_fd(params: ModelParams, fixed_point: PlanktonState, **steps) -> TaylorCoeffs:
    table = fd_taylor_table(params, fixed_point, **steps)
    return TaylorCoeffs(**{f: table[f] for f in TaylorCoeffs.__dataclass_fields__})


def transversality(params: ModelParams, fixed_point: PlanktonState) -> float:
    """d|lambda|/d gamma* at gamma* = 0 for the Jacobian of the shifted, perturbed map.

    |lambda| = sqrt(b(gamma*)) with b(0) = 1, so the derivative is b'(0) / 2:
    (1 - u)/(2(1 + c u^h)) * (u^h (2 - h + 2 c u^h)/(1 + c u^h) + r h / gamma0).
    """
    r, c, g, h = params.r, params.c, params.gamma, params.h
    u = fixed_point.u
    uh = u if h == 1 else u * u
    den = 1.0 + c * uh
    return (1.0 - u) / (2.0 * den) * (uh * (2.0 - h + 2.0 * c * uh) / den + r * h / g)


@dataclass(frozen=True)
class NormalForm:
    c20: float
    c11: float
    c02: float
    c30: float
    c21: float
    c12: float
    c03: float
    d20: float
    d11: float
    d02: float
    d30: float
    d21: float
    d12: float
    d03: float

    def F(self, X, Y):
        return (self.c20 * X * X + self.c11 * X * Y + self.c02 * Y * Y + self.c30 * X ** 3
                + self.c21 * X * X * Y + self.c12 * X * Y * Y + self.c03 * Y ** 3)

    def G(self, X, Y):
        return (self.d20 * X * X + self.d11 * X * Y + self.d02 * Y * Y + self.d30 * X ** 3
                + self.d21 * X * X * Y + self.d12 * X * Y * Y + self.d03 * Y ** 3)

    def partials(self) -> dict[str, float]:
        """Second and third partial derivatives of F and G at the origin."""
        return {
            "F_XX": 2 * self.c20, "F_XY": self.c11, "F_YY": 2 * self.c02,
            "F_XXX": 6 * self.c30, "F_XXY": 2 * self.c21, "F_XYY": 2 * self.c12, "F_YYY": 6 * self.c03,
            "G_XX": 2 * self.d20, "G_XY": self.d11, "G_YY": 2 * self.d02,
            "G_XXX": 6 * self.d30, "G_XXY": 2 * self.d21, "G_XYY": 2 * self.d12, "G_YYY": 6 * self.d03,
        }


def normal_form(coeffs: TaylorCoeffs, m: float, n: float) -> NormalForm:
    """Nonlinear terms in the coordinates X = T^-1 x, T = [[m n, -n], [0, 1]]."""
    a20, a11, a30, a21 = coeffs.a20, coeffs.a11, coeffs.a30, coeffs.a21
    b20, b11, b30, b21 = coeffs.b20, coeffs.b11, coeffs.b30, coeffs.b21
    return NormalForm(
        c20=a20 * m * n + b20 * m * n ** 2,
        c11=a11 - 2 * a20 * n + b11 * n - 2 * b20 * n ** 2,
        c02=(a20 * n - a11 + b20 * n ** 2 - b11 * n) / m,
        c30=a30 * m ** 2 * n ** 2 + b30 * m ** 2 * n ** 3,
        c21=a21 * m * n - 3 * a30 * m * n ** 2 + b21 * m * n ** 2 - 3 * b30 * m * n ** 3,
        c12=3 * a30 * n ** 2 - 2 * a21 * n + 3 * b30 * n ** 3 - 2 * b21 * n ** 2,
        c03=(a21 * n - a30 * n ** 2 + b21 * n ** 2 - b30 * n ** 3) / m,
        d20=b20 * m ** 2 * n ** 2,
        d11=b11 * m * n - 2 * b20 * m * n ** 2,
        d02=b20 * n ** 2 - b11 * n,
        d30=b30 * m ** 3 * n ** 3,
        d21=b21 * m ** 2 * n ** 2 - 3 * b30 * m ** 2 * n ** 3,
        d12=3 * b30 * m * n ** 3 - 2 * b21 * m * n ** 2,
        d03=b21 * n ** 2 - b30 * n ** 3,
    )


def l_coefficients(nf: NormalForm) -> tuple[complex, complex, complex, complex]:
    """(L20, L11, L02, L21) from the partial derivatives of F and G."""
    d = nf.partials()
    L20 = complex(d["F_XX"] - d["F_YY"] + 2 * d["G_XY"], d["G_XX"] - d["G_YY"] - 2 * d["F_XY"]) / 8
    L11 = complex(d["F_XX"] + d["F_YY"], d["G_XX"] + d["G_YY"]) / 4
    L02 = complex(d["F_XX"] - d["F_YY"] - 2 * d["G_XY"], d["G_XX"] - d["G_YY"] + 2 * d["F_XY"]) / 8
    L21 = complex(
        d["F_XXX"] + d["F_XYY"] + d["G_XXY"] + d["G_YYY"],
        d["G_XXX"] + d["G_XYY"] - d["F_XXY"] - d["F_YYY"],
    ) / 16
    return L20, L11, L02, L21


def discriminating_quantity(multiplier: complex, L20: complex, L11: complex,
                            L02: complex, L21: complex) -> float:
    """Cubic coefficient of the amplitude map rho -> rho (|multiplier| + L rho^2).

    ``multiplier`` is the unit eigenvalue by which z = X + iY rotates under
    the linear part; passing its conjugate instead changes L by tens of percent.
    """
    conj = multiplier.conjugate()
    term = (1 - 2 * multiplier) * conj ** 2 / (1 - multiplier) * L11 * L20
    return -term.real - 0.5 * abs(L11) ** 2 - abs(L02) ** 2 + (conj * L21).real


class NSDirection(enum.Enum):
    ATTRACTING_CURVE_FOR_GAMMA_ABOVE = "attracting_curve_for_gamma_above"
    REPELLING_CURVE_FOR_GAMMA_BELOW = "repelling_curve_for_gamma_below"


@dataclass(frozen=True)
class NSReport:
    gamma0: float
    fixed_point: PlanktonState
    eigenvalues: tuple[complex, complex]
    alpha: float
    m: float
    n: float
    L20: complex
    L11: complex
    L02: complex
    L21: complex
    L: float
    direction: NSDirection
    transversality: float
    coeffs: TaylorCoeffs
    normal: NormalForm

    def to_json(self) -> dict:
        lam = self.eigenvalues[1]
        out = {
            "gamma0": self.gamma0,
            "u": self.fixed_point.u,
            "v": self.fixed_point.v,
            "lambda_re": lam.real,
            "lambda_im": lam.imag,
            "alpha": self.alpha,
            "m": self.m,
            "n": self.n,
        }
        for name in ("L20", "L11", "L02", "L21"):
            z = getattr(self, name)
            out[f"{name}_re"] = z.real
            out[f"{name}_im"] = z.imag
        out["L"] = self.L
        out["direction"] = self.direction.value
        out["transversality"] = self.transversality
        out["taylor"] = asdict(self.coeffs)
        return out


def ns_from_coeffs(params: ModelParams, fixed_point: PlanktonState, coeffs: TaylorCoeffs) -> NSReport:
    """Steps from the Taylor coefficients on: eigenbasis, normal form, L."""
    a10 = coeffs.a10
    alpha_sq = 3.0 - a10 * a10 - 2.0 * a10
    if not alpha_sq > 0:
        raise ValueError(f"no complex eigenvalue pair at gamma0 (alpha^2 = {alpha_sq})")
    alpha = math.sqrt(alpha_sq)
    lam1 = complex(1.0 + a10, -alpha) / 2
    lam2 = complex(1.0 + a10, alpha) / 2
    m = alpha / (1.0 - a10)
    n = params.r / (2.0 * params.gamma)
    nf = normal_form(coeffs, m, n)
    L20, L11, L02, L21 = l_coefficients(nf)
    # T^-1 J T = [[Re lam2, -Im lam2], [Im lam2, Re lam2]]: z = X + iY turns by lam2
    L = discriminating_quantity(lam2, L20, L11, L02, L21)
    direction = (NSDirection.ATTRACTING_CURVE_FOR_GAMMA_ABOVE if L < 0
                 else NSDirection.REPELLING_CURVE_FOR_GAMMA_BELOW)
    return NSReport(
        gamma0=params.gamma,
        fixed_point=fixed_point,
        eigenvalues=(lam1, lam2),
        alpha=alpha,
        m=m,
        n=n,
        L20=L20, L11=L11, L02=L02, L21=L21,
        L=L,
        direction=direction,
        transversality=transversality(params, fixed_point),
        coeffs=coeffs,
        normal=nf,
    )


def lyapunov_quantity(params: ModelParams, gamma0: float | None = None, fd: bool = False) -> NSReport:
    """Full Neimark-Sacker report for (r, c, h) of ``params``.

    ``params.gamma`` is ignored: gamma0 comes from :func:`critical_gamma` unless
    given explicitly.  With ``fd=True`` the Taylor coefficients are taken from
    finite differences of the map instead of the closed forms.
    """
    if gamma0 is None:
        gamma0 = critical_gamma(params.r, params.c, params.h)
    crit = params.with_gamma(gamma0)
    fp = positive_fixed_point(crit)
    if fp is None:
        raise ValueError(f"gamma0={gamma0} admits no positive fixed point")
    coeffs = taylor_coeffs_fd(crit, fp) if fd else taylor_coeffs(crit, fp)
    return ns_from_coeffs(crit, fp, coeffs)
