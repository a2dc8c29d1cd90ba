"""Invariant sets, psi minimum, and convergence to the prey-only state E1."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, PlanktonState, nonnegativity_condition, step_uv

__all__ = [
    "SetKind",
    "InvariantSetSpec",
    "make_invariant_set",
    "psi",
    "psi_min",
    "contains",
    "verify_step_stays",
    "converges_to_E1",
    "invariance_preconditions",
]

C_PSI = 27.0 / 4.0


class SetKind(enum.Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    N1 = "N1"
    N2 = "N2"
    AXIS_U = "AxisU"
    AXIS_V = "AxisV"


def psi(x, c: float):
    """(2 - x)(1 + c x^2) / x, +inf at x = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0, (2.0 - x) * (1.0 + c * x * x) / np.where(x > 0, x, 1.0), np.inf)
    return out if out.shape else float(out)


def psi_min(c: float, xtol: float = 1e-14) -> tuple[float, float]:
    """Local minimum of psi on (0, 2/3), located at the root of c x^3 - c x^2 + 1.

    The bracket (0, 2/3) has nu(0) = 1 > 0 and nu(2/3) = (27 - 4c)/27 < 0,
    which requires c > 27/4.
    """
    if not c > C_PSI:
        raise ValueError(f"psi_min needs c > 27/4, got {c}")

    def nu(x):
        return c * x * x * (x - 1.0) + 1.0

    lo, hi = 0.0, 2.0 / 3.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if nu(mid) > 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return x, (2.0 - x) * (1.0 + c * x * x) / x


_KIND_H = {SetKind.M1: 1, SetKind.M2: 1, SetKind.M3: 1, SetKind.N1: 2, SetKind.N2: 2}


@dataclass(frozen=True)
class InvariantSetSpec:
    kind: SetKind
    params: ModelParams
    psi_min: float | None = None

    @property
    def admissible(self) -> bool:
        c, h = self.params.c, self.params.h
        k = self.kind
        if k in _KIND_H and h != _KIND_H[k]:
            return False
        if k is SetKind.M1:
            return c <= 0.5
        if k is SetKind.M2:
            return c >= 1.0
        if k is SetKind.M3:
            return 0.5 < c < 1.0
        if k is SetKind.N1:
            return c <= C_PSI
        if k is SetKind.N2:
            return c > C_PSI
        if k is SetKind.AXIS_V:
            return self.params.r <= 1.0
        return True

    def upper_bound(self, u):
        """Upper bound on v over u (inf where unbounded). Broadcasts over arrays."""
        c = self.params.c
        u = np.asarray(u, dtype=float)
        k = self.kind
        if k is SetKind.M1:
            b = (2.0 - u) * (1.0 + c * u)
        elif k is SetKind.M2:
            b = np.full_like(u, 2.0)
        elif k is SetKind.M3:
            b = np.minimum(2.0, (2.0 - u) * (1.0 + c * u))
        elif k is SetKind.N1:
            b = np.asarray(psi(u, c))
        elif k is SetKind.N2:
            b = np.full_like(u, self.psi_min)
        else:
            b = np.full_like(u, np.inf)
        return b if b.shape else float(b)


def make_invariant_set(kind: SetKind | str, params: ModelParams, check: bool = True) -> InvariantSetSpec:
    """Build a set description, computing psi_min for N2.

    ``check=False`` skips the admissibility test, useful for exhibiting
    counterexamples outside the invariance conditions.
    """
    kind = SetKind(kind)
    pm = psi_min(params.c)[1] if kind is SetKind.N2 and params.c > C_PSI else None
    spec = InvariantSetSpec(kind, params, pm)
    if check and not spec.admissible:
        raise ValueError(f"{kind.value} is not admissible for {params}")
    return spec


def contains(spec: InvariantSetSpec, s, atol: float = 0.0) -> bool | np.ndarray:
    """Membership of s = (u, v), each bound relaxed by ``atol``; u and v may be arrays."""
    u = np.asarray(s[0], dtype=float)
    v = np.asarray(s[1], dtype=float)
    k = spec.kind
    if k is SetKind.AXIS_U:
        out = (u >= -atol) & (u <= 2.0 + atol) & (np.abs(v) <= atol)
    elif k is SetKind.AXIS_V:
        out = (np.abs(u) <= atol) & (v >= -atol)
    else:
        out = (u >= -atol) & (u <= 1.0 + atol) & (v >= -atol) & (v <= spec.upper_bound(u) + atol)
    return out if out.shape else bool(out)


def invariance_preconditions(params: ModelParams) -> bool:
    """Parameter conditions under which the sets are invariant and v never increases."""
    return nonnegativity_condition(params) and params.gamma <= params.r * (1.0 + params.c)


def verify_step_stays(spec: InvariantSetSpec, s, atol: float = 1e-12) -> bool | np.ndarray:
    """Whether the image of s lies in the set.

    The default ``atol`` absorbs rounding for points on the boundary, where
    v = psi(u) maps exactly onto u = 0.
    """
    p = spec.params
    u1, v1 = step_uv(np.asarray(s[0], dtype=float), np.asarray(s[1], dtype=float),
                     p.r, p.c, p.gamma, p.h)
    return contains(spec, (u1, v1), atol)


def converges_to_E1(params: ModelParams, s0: PlanktonState, max_iter: int = 100_000,
                    tol: float = 1e-8) -> tuple[bool, int]:
    """Iterate until the sup-norm distance to (1, 0) drops below ``tol``.

    Returns (converged, iterations used); ``iterations`` is max_iter on failure.
    """
    r, c, g, h = params.r, params.c, params.gamma, params.h
    u, v = float(s0[0]), float(s0[1])
    for n in range(max_iter + 1):
        if abs(u - 1.0) < tol and abs(v) < tol:
            return True, n
        if not (math.isfinite(u) and math.isfinite(v)):
            break
        u, v = step_uv(u, v, r, c, g, h)
    return False, max_iter
