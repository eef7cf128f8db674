"""Monte Carlo checks of volume scaling and of the horizontal flow-tube estimate.

Sampling is split over ``workers`` independent streams spawned from
``SeedSequence(seed)``; only hit counts are merged, so results do not depend
on how the streams are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..algebra import CarnotAlgebra
from .group import box_gauge, bracket_tensor, require_step2

CHUNK = 1 << 16


def _streams(seed: int, samples: int, workers: int):
    seqs = np.random.SeedSequence(seed).spawn(workers)
    base, extra = divmod(samples, workers)
    for idx, ss in enumerate(seqs):
        yield np.random.default_rng(ss), base + (idx < extra)


def _uniform_box(rng, count: int, lo: np.ndarray, hi: np.ndarray):
    for start in range(0, count, CHUNK):
        m = min(CHUNK, count - start)
        yield lo + (hi - lo) * rng.random((m, len(lo)))


@dataclass
class VolumeScaling:
    eps: list[float]
    volumes: list[float]
    stderrs: list[float]
    slope: float
    slope_stderr: float
    samples: int
    seed: int

    def rows(self):
        return [(e, v, s) for e, v, s in zip(self.eps, self.volumes, self.stderrs)]

    def to_json(self) -> dict:
        return asdict(self)


def volume_scaling_experiment(alg: CarnotAlgebra, eps_list=(0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
                              samples: int = 1_000_000, seed: int = 0,
                              workers: int = 4) -> VolumeScaling:
    """Estimate vol{box_gauge <= eps} by hit counting in the largest gauge box,
    then fit the slope of log vol against log eps (weighted least squares)."""
    require_step2(alg)
    eps = np.asarray(sorted(eps_list), float)
    if np.any(eps <= 0) or len(eps) < 2:
        raise ValueError("need at least two positive scales")
    w = np.asarray(alg.weights, float)
    half = eps[-1] ** w
    ref_volume = float(np.prod(2 * half))
    hits = np.zeros(len(eps), dtype=np.int64)
    for rng, count in _streams(seed, samples, workers):
        for pts in _uniform_box(rng, count, -half, half):
            g = box_gauge(alg, pts)
            hits += np.searchsorted(np.sort(g), eps, side="right")
    frac = hits / samples
    volumes = frac * ref_volume
    stderr = ref_volume * np.sqrt(frac * (1 - frac) / samples)
    if np.any(hits == 0):
        raise ValueError("no samples fell in the smallest ball; raise samples or eps")
    # delta-method error of log(volume); the largest ball is the sampling box itself
    log_sigma = np.sqrt(np.maximum(1 - frac, 1 / samples) / hits)
    weights = 1 / log_sigma
    x, y = np.log(eps), np.log(volumes)
    coef, cov = np.polyfit(x, y, 1, w=weights, cov="unscaled")
    return VolumeScaling(eps.tolist(), volumes.tolist(), stderr.tolist(), float(coef[0]),
                         float(np.sqrt(cov[0, 0])), samples, seed)


@dataclass
class TubeExperiment:
    eps: float
    tau: float
    samples: int
    seed: int
    tube_volume: float
    tube_stderr: float
    box_volume: float
    ratio: float
    ratio_stderr: float

    def to_json(self) -> dict:
        return asdict(self)


def _in_tube(points: np.ndarray, c: np.ndarray, half: np.ndarray, tau: float) -> np.ndarray:
    # p in Tube iff p . exp(-t e_1) lies in the box for some t in [0, tau];
    # every coordinate of p . exp(-t e_1) is affine in t: p_k - t * s_k
    s = 0.5 * points @ c[:, 0, :]
    s[:, 0] += 1.0
    lo = np.zeros(len(points))
    hi = np.full(len(points), tau)
    ok = np.ones(len(points), dtype=bool)
    for k in range(points.shape[1]):
        pk, sk, b = points[:, k], s[:, k], half[k]
        zero = sk == 0
        ok &= ~zero | (np.abs(pk) <= b)
        safe = np.where(zero, 1.0, sk)
        t1 = (pk - b) / safe
        t2 = (pk + b) / safe
        lo = np.where(zero, lo, np.maximum(lo, np.minimum(t1, t2)))
        hi = np.where(zero, hi, np.minimum(hi, np.maximum(t1, t2)))
    return ok & (lo <= hi)


def tube_experiment(alg: CarnotAlgebra, eps: float, tau: float, samples: int = 1_000_000,
                    seed: int = 0, workers: int = 4) -> TubeExperiment:
    """Volume of the set swept by the gauge box of size ``eps`` under right
    translation by ``exp(t e_1)``, ``0 <= t <= tau``, compared with
    ``(tau / eps) * vol(box)``.

    Points are drawn in sheared coordinates ``u = (p_1, p . exp(-p_1 e_1))``
    (a volume-preserving change of variables) where the tube fits in a box of
    size comparable to its own.
    """
    require_step2(alg)
    if eps <= 0 or tau <= 0:
        raise ValueError("eps and tau must be positive")
    c = bracket_tensor(alg)
    w = np.asarray(alg.weights, float)
    half = eps ** w
    h = alg.h
    # bound on |(b . exp(-b_1 e_1))_k| for b in the box
    shear = 0.5 * eps * (np.abs(c[:h, 0, :]) * half[:h, None]).sum(axis=0)
    bound = half + shear
    lo = -bound.copy()
    hi = bound.copy()
    lo[0], hi[0] = -eps, tau + eps
    sample_volume = float(np.prod(hi - lo))
    hits = 0
    for rng, count in _streams(seed, samples, workers):
        for u in _uniform_box(rng, count, lo, hi):
            p = u.copy()
            # undo the shear: only weight-2 coordinates move, by s/2 * [p, e_1]
            p[:, h:] += 0.5 * u[:, :1] * (u[:, :h] @ c[:h, 0, h:])
            hits += int(np.count_nonzero(_in_tube(p, c, half, tau)))
    frac = hits / samples
    vol = frac * sample_volume
    err = sample_volume * np.sqrt(frac * (1 - frac) / samples)
    box_volume = float(np.prod(2 * half))
    scale = tau / eps * box_volume
    return TubeExperiment(eps, tau, samples, seed, vol, float(err), box_volume,
                          vol / scale, float(err / scale))
