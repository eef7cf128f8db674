"""Upper bounds for the Carnot-Caratheodory distance on Heis^3.

Exponential coordinates ``(x, y, z)`` have group law
``z = z1 + z2 + (x1 y2 - y1 x2) / 2``. In the coordinates ``z' = z + x y / 2``
the horizontal distribution is ``ker(dz' - x dy)``, so a planar path starting
at the origin lifts to a horizontal curve ending at the target exactly when
``integral x dy = z'``. The distance is bounded above by the length of the
shortest polygon found subject to that constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..algebra import CarnotAlgebra
from ..errors import ConvergenceError, StepUnsupported

TOLERANCE = 1e-6
PENALTY_START = 10.0
PENALTY_GROWTH = 10.0
OUTER_ITERATIONS = 6


def require_heis3(alg: CarnotAlgebra) -> None:
    if alg.strata_dims != (2, 1) or alg.brackets != {(0, 1): {2: 1}}:
        raise StepUnsupported("CC distance optimisation is implemented for heisenberg(1) only")


def lift_height(target) -> float:
    """Value of integral x dy needed to reach ``target`` (exponential coordinates)."""
    x, y, z = map(float, target)
    return z + 0.5 * x * y


def path_length(vertices: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(vertices, axis=0), axis=1).sum())


def lifted_height(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return float(0.5 * np.sum((x[:-1] + x[1:]) * np.diff(y)))


def _height_grad(full: np.ndarray) -> np.ndarray:
    x, y = full[:, 0], full[:, 1]
    g = np.zeros_like(full)
    g[1:-1, 0] = 0.5 * (y[2:] - y[:-2])
    g[1:-1, 1] = 0.5 * (x[:-2] - x[2:])
    return g[1:-1]


@dataclass
class PathResult:
    length: float
    violation: float
    vertices: np.ndarray
    converged: bool


def _solve(start: np.ndarray, end: np.ndarray, height: float, interior: np.ndarray,
           scale: float) -> PathResult:
    k = len(interior) + 1

    def assemble(flat):
        full = np.empty((k + 1, 2))
        full[0], full[-1] = start, end
        full[1:-1] = flat.reshape(-1, 2)
        return full

    def objective(flat, mu):
        full = assemble(flat)
        seg = np.diff(full, axis=0)
        norms = np.sqrt((seg ** 2).sum(axis=1) + 1e-18 * scale ** 2)
        unit = seg / norms[:, None]
        grad_len = unit[:-1] - unit[1:]
        gap = lifted_height(full) - height
        # penalty measured in units of length so the problem is dilation-equivariant
        value = norms.sum() + mu * gap ** 2 / scale ** 3
        grad = grad_len + 2 * mu * gap / scale ** 3 * _height_grad(full)
        return value, grad.ravel()

    flat = interior.ravel().copy()
    mu = PENALTY_START
    for _ in range(OUTER_ITERATIONS):
        res = minimize(objective, flat, args=(mu,), jac=True, method="BFGS",
                       options={"gtol": 1e-9, "maxiter": 5000})
        flat = res.x
        mu *= PENALTY_GROWTH
    # Newton steps along the constraint gradient remove the residual penalty bias
    for _ in range(20):
        full = assemble(flat)
        gap = lifted_height(full) - height
        if abs(gap) <= 1e-14 * max(scale ** 2, 1.0):
            break
        g = _height_grad(full).ravel()
        gg = float(g @ g)
        if gg == 0:
            break
        flat = flat - gap / gg * g
    full = assemble(flat)
    violation = abs(lifted_height(full) - height)
    return PathResult(path_length(full), violation, full, violation <= TOLERANCE * max(scale ** 2, 1.0))


def optimize_path(alg: CarnotAlgebra, target, segments: int = 16, restarts: int = 4,
                  seed: int = 0) -> PathResult:
    """Best (shortest) constrained polygon over seeded random restarts."""
    require_heis3(alg)
    if segments < 8:
        raise ValueError("segments must be >= 8")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    target = np.asarray(target, float)
    start = np.zeros(2)
    end = target[:2].copy()
    height = lift_height(target)
    scale = max(float(np.abs(end).max()), float(np.sqrt(abs(height))))
    if scale == 0:
        return PathResult(0.0, 0.0, np.zeros((2, 2)), True)
    rng = np.random.default_rng(seed)
    s = np.linspace(0, 1, segments + 1)[1:-1, None]
    best: PathResult | None = None
    for _ in range(restarts):
        interior = s * end + 0.5 * scale * rng.standard_normal((segments - 1, 2))
        result = _solve(start, end, height, interior, scale)
        if not result.converged:
            continue
        if best is None or result.length < best.length:
            best = result
    if best is None:
        raise ConvergenceError(
            f"no restart met the constraint tolerance {TOLERANCE} for target {target.tolist()}")
    return best


def cc_distance_upper(alg: CarnotAlgebra, target, segments: int = 16, restarts: int = 4,
                      seed: int = 0) -> float:
    return optimize_path(alg, target, segments, restarts, seed).length
