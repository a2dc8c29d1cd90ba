"""Linear feedback stabilisation of the positive fixed point.

The control term delta = -s1 (u - u*) - s2 (v - v*) is added to the prey
update only.  Gains (s1, s2) stabilise the fixed point exactly inside the
triangle bounded by the marginal lines l1 (det = 1), l2 (lambda = 1) and
l3 (lambda = -1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import Jacobian2x2, ModelParams, PlanktonState, step_uv

__all__ = [
    "ControlGains",
    "Line",
    "ControlTriangle",
    "GainStability",
    "controlled_step",
    "controlled_jacobian",
    "control_triangle",
    "is_stable",
]


class ControlGains(NamedTuple):
    s1: float
    s2: float


@dataclass(frozen=True)
class Line:
    """The line A*s1 + B*s2 + C = 0."""

    name: str
    A: float
    B: float
    C: float

    def __call__(self, s1, s2):
        return self.A * s1 + self.B * s2 + self.C

    def distance(self, s1, s2):
        return np.abs(self(s1, s2)) / np.hypot(self.A, self.B)


def _intersect(p: Line, q: Line) -> tuple[float, float]:
    det = p.A * q.B - q.A * p.B
    if det == 0:
        raise ValueError(f"lines {p.name} and {q.name} are parallel")
    s1 = (p.B * q.C - q.B * p.C) / det
    s2 = (q.A * p.C - p.A * q.C) / det
    return s1, s2


@dataclass(frozen=True)
class ControlTriangle:
    l1: Line
    l2: Line
    l3: Line
    vertices: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]

    @property
    def lines(self) -> tuple[Line, Line, Line]:
        return self.l1, self.l2, self.l3

    @property
    def centroid(self) -> tuple[float, float]:
        s1 = sum(p[0] for p in self.vertices) / 3.0
        s2 = sum(p[1] for p in self.vertices) / 3.0
        return s1, s2

    def contains(self, s1, s2, band: float = 0.0):
        """Strict interior test; points within ``band`` of an edge count as outside.

        Orientation of each half-plane is fixed by the sign at the centroid.
        Broadcasts over arrays.
        """
        cs1, cs2 = self.centroid
        inside = np.ones(np.broadcast(np.asarray(s1), np.asarray(s2)).shape, dtype=bool)
        for line in self.lines:
            sign = np.sign(line(cs1, cs2))
            inside &= sign * line(s1, s2) / np.hypot(line.A, line.B) > band
        return inside if inside.shape else bool(inside)

    def edge_distance(self, s1, s2):
        return np.minimum.reduce([line.distance(s1, s2) for line in self.lines])


class GainStability(NamedTuple):
    stable: bool
    eigenvalues: tuple[complex, complex]


def controlled_step(params: ModelParams, gains: ControlGains, fixed_point: PlanktonState,
                    s: PlanktonState) -> PlanktonState:
    u, v = s
    u1, v1 = step_uv(u, v, params.r, params.c, params.gamma, params.h)
    delta = -gains[0] * (u - fixed_point.u) - gains[1] * (v - fixed_point.v)
    return PlanktonState(u1 + delta, v1)


def _fixed_point_terms(params: ModelParams, fixed_point: PlanktonState):
    r, c, g, h = params.r, params.c, params.gamma, params.h
    u = fixed_point.u
    uh = u if h == 1 else u * u
    den = 1.0 + c * uh
    a10 = (1.0 - u) * (2.0 - h + 2.0 * c * uh) / den
    k = g * h * (1.0 - u) / den
    return a10, k, r * h * (1.0 - u) / den, (1.0 - u) * (4.0 - 2.0 * h + r * h + 4.0 * c * uh) / den


def controlled_jacobian(params: ModelParams, fixed_point: PlanktonState,
                        gains: ControlGains) -> Jacobian2x2:
    a10, k, _, _ = _fixed_point_terms(params, fixed_point)
    return Jacobian2x2(a10 - gains[0], -params.r / params.gamma - gains[1], k, 1.0)


def control_triangle(params: ModelParams, fixed_point: PlanktonState) -> ControlTriangle:
    a10, k, rterm, fm1 = _fixed_point_terms(params, fixed_point)
    q = a10 + rterm
    l1 = Line("l1", 1.0, -k, 1.0 - q)
    l2 = Line("l2", 0.0, params.gamma, params.r)
    l3 = Line("l3", 2.0, -k, -2.0 - fm1)
    vertices = (_intersect(l1, l2), _intersect(l2, l3), _intersect(l1, l3))
    return ControlTriangle(l1, l2, l3, vertices)


def is_stable(params: ModelParams, fixed_point: PlanktonState, gains: ControlGains,
              tol: float = 1e-12) -> GainStability:
    """Both closed-loop eigenvalues strictly inside the unit circle (margin ``tol``)."""
    eigs = controlled_jacobian(params, fixed_point, gains).eigenvalues()
    return GainStability(max(abs(e) for e in eigs) < 1.0 - tol, eigs)
