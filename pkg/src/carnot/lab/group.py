"""Step-2 Carnot groups in exponential coordinates (floating point)."""

from __future__ import annotations

import numpy as np

from ..algebra import CarnotAlgebra
from ..errors import StepUnsupported


def require_step2(alg: CarnotAlgebra) -> None:
    if alg.step > 2:
        raise StepUnsupported(f"{alg.name} has step {alg.step}; only step <= 2 is supported")


def bracket_tensor(alg: CarnotAlgebra) -> np.ndarray:
    """``C[i, j, k]`` with ``[e_i, e_j] = sum_k C[i, j, k] e_k``."""
    n = alg.n
    c = np.zeros((n, n, n))
    for (i, j), coeffs in alg.brackets.items():
        for k, v in coeffs.items():
            c[i, j, k] = float(v)
            c[j, i, k] = -float(v)
    return c


def lie_bracket(alg: CarnotAlgebra, x, y) -> np.ndarray:
    c = bracket_tensor(alg)
    return np.einsum("...i,...j,ijk->...k", np.asarray(x, float), np.asarray(y, float), c)


def group_multiply(alg: CarnotAlgebra, x, y) -> np.ndarray:
    """``x . y = x + y + [x, y] / 2``; the BCH series stops there in step 2."""
    require_step2(alg)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    return x + y + 0.5 * lie_bracket(alg, x, y)


def group_inverse(alg: CarnotAlgebra, x) -> np.ndarray:
    require_step2(alg)
    return -np.asarray(x, float)


def dilate(alg: CarnotAlgebra, eps: float, x) -> np.ndarray:
    if eps <= 0:
        raise ValueError("dilation factor must be positive")
    w = np.asarray(alg.weights, float)
    return np.asarray(x, float) * eps ** w


def box_gauge(alg: CarnotAlgebra, x) -> np.ndarray | float:
    """Homogeneous quasi-norm ``max_i |x_i|^(1/w_i)`` (vectorised over rows)."""
    w = np.asarray(alg.weights, float)
    g = np.max(np.abs(np.asarray(x, float)) ** (1.0 / w), axis=-1)
    return float(g) if np.ndim(g) == 0 else g
