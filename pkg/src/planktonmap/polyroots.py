"""Real roots of low-degree polynomials (quadratic, cubic)."""
from __future__ import annotations

import math

__all__ = ["real_quadratic_roots", "real_cubic_roots"]


def real_quadratic_roots(a: float, b: float, c: float) -> list[float]:
    """Real roots of a x^2 + b x + c, ascending. Degenerates to linear when a == 0."""
    if a == 0:
        if b == 0:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return []
    s = math.sqrt(disc)
    qq = -0.5 * (b + math.copysign(s, b))
    if qq == 0:
        return [0.0, 0.0]
    return sorted((qq / a, c / qq))


def _polish(coeffs: tuple[float, float, float, float], x: float, iters: int = 3) -> float:
    a, b, c, d = coeffs
    for _ in range(iters):
        f = ((a * x + b) * x + c) * x + d
        df = (3.0 * a * x + 2.0 * b) * x + c
        if df == 0 or f == 0:
            break
        x_new = x - f / df
        f_new = ((a * x_new + b) * x_new + c) * x_new + d
        if abs(f_new) >= abs(f):
            break
        x = x_new
    return x


def real_cubic_roots(a: float, b: float, c: float, d: float, rel_eps: float = 1e-14) -> list[float]:
    """Real roots of a x^3 + b x^2 + c x + d, ascending, with multiplicity.

    Trigonometric form when all three roots are real, Cardano otherwise; each
    root gets a few guarded Newton steps on the original polynomial.  A leading
    coefficient below ``rel_eps`` times the largest other coefficient is treated
    as zero and the quadratic is solved instead.
    """
    scale = max(abs(b), abs(c), abs(d))
    if a == 0 or abs(a) <= rel_eps * scale:
        return real_quadratic_roots(b, c, d)

    B, C, D = b / a, c / a, d / a
    shift = B / 3.0
    p = C - B * B / 3.0
    q = 2.0 * B ** 3 / 27.0 - B * C / 3.0 + D

    if abs(p) < 1e-150:
        # (p/3)^3 would underflow; treat as a pure cube
        ts = [-math.copysign(abs(q) ** (1.0 / 3.0), q)]
    else:
        disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
        if p > 0 or disc > 0:
            w = -q / 2.0 - math.copysign(math.sqrt(disc), q)
            w = math.copysign(abs(w) ** (1.0 / 3.0), w)
            ts = [w - p / (3.0 * w)] if w != 0 else [0.0]
        else:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
            ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]

    coeffs = (a, b, c, d)
    roots = [_polish(coeffs, t - shift) for t in ts]
    if len(roots) == 1:
        roots += _double_root_pair(coeffs, roots[0])
    return sorted(roots)


def _double_root_pair(coeffs, x1: float) -> list[float]:
    # Rounding can push a double root's discriminant slightly positive; deflate
    # by the simple root and keep the remaining pair when it is (nearly) real.
    a, b, c, _ = coeffs
    qb = b + a * x1
    qc = c + qb * x1
    disc = qb * qb - 4.0 * a * qc
    if disc >= 0:
        return real_quadratic_roots(a, qb, qc)
    if -disc <= 1e-12 * max(qb * qb, abs(4.0 * a * qc), 1e-300):
        x = _polish(coeffs, -qb / (2.0 * a))
        return [x, x]
    return []
