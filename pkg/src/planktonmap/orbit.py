"""Trajectories, maximum Lyapunov exponents, and parameter sweeps.

Sweeps are vectorised over the gamma grid and split into chunks of fixed
size; chunks run on a thread pool (numpy releases the GIL inside ufuncs).
The chunk layout does not depend on the thread count, so outputs are
bit-identical for any ``threads``.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .model import ModelParams, PlanktonState, jacobian_uv, step_uv
from .stability import NoCriticalParameter, critical_gamma

__all__ = [
    "DIVERGENCE_LIMIT",
    "OrbitRecord",
    "SweepConfig",
    "LyapunovEstimate",
    "BifurcationTable",
    "MLECurve",
    "RegionTable",
    "simulate",
    "max_lyapunov",
    "mle_curve",
    "bifurcation_diagram",
    "stability_region",
    "write_csv",
]

DIVERGENCE_LIMIT = 1e6
CHUNK = 256


@dataclass(frozen=True)
class OrbitRecord:
    params: ModelParams
    initial: PlanktonState
    states: np.ndarray  # shape (length, 2)
    diverged: bool = False

    @property
    def length(self) -> int:
        return len(self.states)

    def state(self, k: int) -> PlanktonState:
        return PlanktonState(float(self.states[k, 0]), float(self.states[k, 1]))

    @property
    def last(self) -> PlanktonState:
        return self.state(-1)


def _escaped(u: float, v: float) -> bool:
    return not (math.isfinite(u) and math.isfinite(v)) or abs(u) > DIVERGENCE_LIMIT or abs(v) > DIVERGENCE_LIMIT


def simulate(params: ModelParams, s0: PlanktonState, n: int) -> OrbitRecord:
    """n iterates of the map from s0 (n + 1 states), truncated on divergence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    r, c, g, h = params.r, params.c, params.gamma, params.h
    out = np.empty((n + 1, 2))
    u, v = float(s0[0]), float(s0[1])
    out[0] = u, v
    for k in range(1, n + 1):
        u, v = step_uv(u, v, r, c, g, h)
        if _escaped(u, v):
            return OrbitRecord(params, PlanktonState(*s0), out[:k].copy(), True)
        out[k] = u, v
    return OrbitRecord(params, PlanktonState(*s0), out, False)


@dataclass(frozen=True)
class SweepConfig:
    gamma_range: tuple[float, float, int] = (0.5, 3.0, 1000)
    transient: int = 2000
    samples: int = 200
    initial: tuple[float, float] = (0.35, 0.6)
    seed: int = 0

    def __post_init__(self):
        lo, hi, steps = self.gamma_range
        if not lo < hi:
            raise ValueError(f"empty gamma range [{lo}, {hi}]")
        if steps < 2:
            raise ValueError("gamma grid needs at least 2 points")
        if self.transient < 0:
            raise ValueError("transient must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    @property
    def gammas(self) -> np.ndarray:
        lo, hi, steps = self.gamma_range
        return np.linspace(lo, hi, int(steps))


def _chunked(fn, gammas: np.ndarray, threads: int | None):
    chunks = [gammas[i:i + CHUNK] for i in range(0, len(gammas), CHUNK)]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(chunks) == 1:
        return [fn(ch) for ch in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _advance(u, v, alive, r, c, g, h):
    u, v = step_uv(u, v, r, c, g, h)
    # NaN fails both comparisons
    bad = alive & ~((np.abs(u) <= DIVERGENCE_LIMIT) & (np.abs(v) <= DIVERGENCE_LIMIT))
    if bad.any():
        alive = alive & ~bad
        u = np.where(alive, u, np.nan)
        v = np.where(alive, v, np.nan)
    return u, v, alive


def _orbit_block(gammas, r, c, h, initial, transient, samples):
    u = np.full(gammas.shape, float(initial[0]))
    v = np.full(gammas.shape, float(initial[1]))
    alive = np.ones(gammas.shape, dtype=bool)
    us = np.empty((len(gammas), samples))
    vs = np.empty((len(gammas), samples))
    with np.errstate(all="ignore"):
        for _ in range(transient):
            u, v, alive = _advance(u, v, alive, r, c, gammas, h)
        for k in range(samples):
            u, v, alive = _advance(u, v, alive, r, c, gammas, h)
            us[:, k] = u
            vs[:, k] = v
    us[~alive] = np.nan
    vs[~alive] = np.nan
    return us, vs, ~alive


class LyapunovEstimate(NamedTuple):
    value: float
    steps: int
    diverged: bool

    def __float__(self) -> float:
        return float(self.value)


def _mle_block(gammas, r, c, h, initial, n, transient, angle, renorm_every):
    u = np.full(gammas.shape, float(initial[0]))
    v = np.full(gammas.shape, float(initial[1]))
    alive = np.ones(gammas.shape, dtype=bool)
    wx = np.full(gammas.shape, math.cos(angle))
    wy = np.full(gammas.shape, math.sin(angle))
    acc = np.zeros(gammas.shape)
    counted = np.zeros(gammas.shape, dtype=np.int64)
    with np.errstate(all="ignore"):
        for _ in range(transient):
            u, v, alive = _advance(u, v, alive, r, c, gammas, h)
        for k in range(1, n + 1):
            j11, j12, j21, j22 = jacobian_uv(u, v, r, c, gammas, h)
            wx, wy = j11 * wx + j12 * wy, j21 * wx + j22 * wy
            u, v, alive = _advance(u, v, alive, r, c, gammas, h)
            if k % renorm_every == 0 or k == n:
                norm = np.hypot(wx, wy)
                acc += np.where(alive, np.log(norm), 0.0)
                counted = np.where(alive, k, counted)
                wx = wx / norm
                wy = wy / norm
    with np.errstate(all="ignore"):
        mle = np.where(counted > 0, acc / counted, np.nan)
    return mle, counted, ~alive


def _angle(seed: int) -> float:
    return float(np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi))


def max_lyapunov(params: ModelParams, s0: PlanktonState, n: int = 20_000, transient: int = 2000,
                 seed: int = 0, renorm_every: int = 1) -> LyapunovEstimate:
    """Largest Lyapunov exponent from tangent-vector iteration along the orbit of s0.

    The first ``transient`` iterates are discarded.  On divergence the average
    over the steps completed so far is returned with ``diverged`` set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if renorm_every < 1:
        raise ValueError("renorm_every must be >= 1")
    mle, counted, div = _mle_block(np.array([params.gamma]), params.r, params.c, params.h,
                                   s0, n, transient, _angle(seed), renorm_every)
    return LyapunovEstimate(float(mle[0]), int(counted[0]), bool(div[0]))


def write_csv(out: str | os.PathLike | IO[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with a header row; floats as 17 significant digits."""

    def fmt(x):
        if isinstance(x, (bool, np.bool_)):
            return str(int(x))
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        if isinstance(x, (float, np.floating)):
            return format(float(x), ".17g")
        return str(x)

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])

    if hasattr(out, "write"):
        emit(out)
    else:
        with open(out, "w", newline="") as fh:
            emit(fh)


@dataclass(frozen=True)
class BifurcationTable:
    gammas: np.ndarray
    u: np.ndarray  # (len(gammas), samples)
    v: np.ndarray
    diverged: np.ndarray

    def rows(self):
        for i, g in enumerate(self.gammas):
            for k in range(self.u.shape[1]):
                yield g, k, self.u[i, k], self.v[i, k]

    def to_csv(self, out) -> None:
        write_csv(out, ("gamma", "sample_index", "u", "v"), self.rows())


def bifurcation_diagram(params: ModelParams, sweep: SweepConfig, threads: int | None = None) -> BifurcationTable:
    """Post-transient samples of (u, v) for each gamma on the sweep grid; gamma in ``params`` is ignored."""
    gammas = sweep.gammas

    def run(chunk):
        return _orbit_block(chunk, params.r, params.c, params.h, sweep.initial, sweep.transient, sweep.samples)

    parts = _chunked(run, gammas, threads)
    return BifurcationTable(
        gammas,
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )


@dataclass(frozen=True)
class MLECurve:
    gammas: np.ndarray
    mle: np.ndarray
    diverged: np.ndarray

    def to_csv(self, out) -> None:
        write_csv(out, ("gamma", "mle"), zip(self.gammas, self.mle))


def mle_curve(params: ModelParams, sweep: SweepConfig, n: int = 20_000, threads: int | None = None,
              renorm_every: int = 1) -> MLECurve:
    """Maximum Lyapunov exponent over the sweep grid (``sweep.transient`` iterates discarded)."""
    gammas = sweep.gammas
    angle = _angle(sweep.seed)

    def run(chunk):
        return _mle_block(chunk, params.r, params.c, params.h, sweep.initial, n, sweep.transient,
                          angle, renorm_every)

    parts = _chunked(run, gammas, threads)
    return MLECurve(gammas, np.concatenate([p[0] for p in parts]), np.concatenate([p[2] for p in parts]))


@dataclass(frozen=True)
class RegionTable:
    r: np.ndarray
    c: np.ndarray
    gamma_low: np.ndarray
    gamma_high: np.ndarray  # NaN where no critical parameter exists

    @property
    def failed(self) -> np.ndarray:
        return np.isnan(self.gamma_high)

    def to_csv(self, out) -> None:
        write_csv(out, ("r", "c", "gamma_low", "gamma_high"),
                  zip(self.r, self.c, self.gamma_low, self.gamma_high))


def stability_region(r_range: tuple[float, float, int], c_range: tuple[float, float, int], h: int) -> RegionTable:
    """Band r(1+c) < gamma < gamma0(r, c) where the positive fixed point attracts."""
    rs = np.linspace(*r_range[:2], int(r_range[2]))
    cs = np.linspace(*c_range[:2], int(c_range[2]))
    if rs.size == 0 or cs.size == 0 or rs.min() <= 0 or cs.min() <= 0:
        raise ValueError("r and c grids must be non-empty and positive")
    R, C = np.meshgrid(rs, cs, indexing="ij")
    R, C = R.ravel(), C.ravel()
    high = np.empty_like(R)
    for i, (r, c) in enumerate(zip(R, C)):
        try:
            high[i] = critical_gamma(float(r), float(c), h)
        except NoCriticalParameter:
            high[i] = np.nan
    return RegionTable(R, C, R * (1.0 + C), high)
