"""The discrete phytoplankton-zooplankton map.

    u' = u(2 - u) - u^h v / (1 + c u^h)
    v' = gamma u^h v / (1 + c u^h) + (1 - r) v

with Holling type II (h=1) or type III (h=2) response.  All functions are pure
and work on python floats; the ``*_uv`` helpers also accept numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModelParams",
    "PlanktonState",
    "Jacobian2x2",
    "step",
    "step_uv",
    "jacobian",
    "jacobian_uv",
    "positive_fixed_point",
    "boundary_fixed_points",
    "nonnegativity_condition",
]


@dataclass(frozen=True)
class ModelParams:
    r: float
    c: float
    gamma: float
    h: int = 1

    def __post_init__(self):
        for name in ("r", "c", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.r <= 0:
            raise ValueError(f"r must be > 0, got {self.r}")
        if self.c <= 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if self.h not in (1, 2):
            raise ValueError(f"h must be 1 or 2, got {self.h}")

    def with_gamma(self, gamma: float) -> "ModelParams":
        return ModelParams(self.r, self.c, gamma, self.h)


class PlanktonState(NamedTuple):
    u: float
    v: float

    @property
    def nonnegative(self) -> bool:
        return self.u >= 0 and self.v >= 0


@dataclass(frozen=True)
class Jacobian2x2:
    j11: float
    j12: float
    j21: float
    j22: float

    @property
    def trace(self) -> float:
        return self.j11 + self.j22

    @property
    def det(self) -> float:
        return self.j11 * self.j22 - self.j12 * self.j21

    def as_array(self) -> np.ndarray:
        return np.array([[self.j11, self.j12], [self.j21, self.j22]])

    def eigenvalues(self) -> tuple[complex, complex]:
        """Roots of lambda^2 - trace*lambda + det, smaller imaginary part first."""
        tr, det = self.trace, self.det
        disc = tr * tr - 4.0 * det
        if disc >= 0:
            s = math.sqrt(disc)
            # avoid cancellation in the smaller root
            big = 0.5 * (tr + math.copysign(s, tr)) if tr != 0 else 0.5 * s
            small = det / big if big != 0 else 0.5 * (tr - s)
            lo, hi = sorted((big, small))
            return complex(lo), complex(hi)
        s = math.sqrt(-disc)
        return complex(0.5 * tr, -0.5 * s), complex(0.5 * tr, 0.5 * s)


def _powh(u, h: int):
    return u if h == 1 else u * u


def _powh1(u, h: int):
    # u^(h-1) with u^0 := 1, also at u = 0
    return 1.0 if h == 1 else u


def step_uv(u, v, r: float, c: float, gamma: float, h: int):
    """One iterate on raw coordinates; broadcasts over numpy arrays."""
    uh = _powh(u, h)
    f = uh / (1.0 + c * uh)
    return u * (2.0 - u) - f * v, gamma * f * v + (1.0 - r) * v


def step(params: ModelParams, s: PlanktonState) -> PlanktonState:
    u, v = step_uv(s[0], s[1], params.r, params.c, params.gamma, params.h)
    return PlanktonState(u, v)


def jacobian_uv(u, v, r: float, c: float, gamma: float, h: int):
    """Jacobian entries (j11, j12, j21, j22) on raw coordinates."""
    uh = _powh(u, h)
    den = 1.0 + c * uh
    dfdu = h * _powh1(u, h) / (den * den)
    f = uh / den
    return 2.0 - 2.0 * u - v * dfdu, -f, gamma * v * dfdu, gamma * f + 1.0 - r


def jacobian(params: ModelParams, s: PlanktonState) -> Jacobian2x2:
    return Jacobian2x2(*jacobian_uv(s[0], s[1], params.r, params.c, params.gamma, params.h))


def boundary_fixed_points() -> tuple[PlanktonState, PlanktonState]:
    """E0 = (0, 0) and E1 = (1, 0); fixed for every parameter set."""
    return PlanktonState(0.0, 0.0), PlanktonState(1.0, 0.0)


def positive_fixed_point(params: ModelParams) -> PlanktonState | None:
    """Interior fixed point, or None unless gamma > r(1 + c)."""
    r, c, gamma, h = params.r, params.c, params.gamma, params.h
    if gamma <= r * (1.0 + c):
        return None
    uh = r / (gamma - r * c)
    u = uh if h == 1 else math.sqrt(uh)
    v = (1.0 - u) * (1.0 + c * uh) / _powh1(u, h)
    return PlanktonState(u, v)


def nonnegativity_condition(params: ModelParams) -> bool:
    """True when v' >= 0 is guaranteed for all u in [0, 1], v >= 0.

    Equivalent to u^h (gamma + c - r c) + 1 - r >= 0 on [0, 1].
    """
    r, c, g = params.r, params.c, params.gamma
    if g <= -1.0:
        return c >= -1.0 - g and 0.0 < r <= (c + 1.0 + g) / (c + 1.0)
    if g <= 0.0:
        return 0.0 < r <= (c + 1.0 + g) / (c + 1.0)
    return 0.0 < r <= 1.0
