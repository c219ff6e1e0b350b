"""Probability-simplex geometry: KL divergence, the entropic
(exponentiated-gradient) step, its prox characterization, and Euclidean
projection.
"""

import numpy as np

from . import backends

__all__ = ["kl", "entropic_step", "kl_prox", "project_simplex", "three_point_gap"]


def kl(x: np.ndarray, y: np.ndarray) -> float:
    """Kullback-Leibler divergence sum x_i log(x_i / y_i), 0 log 0 = 0."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    mask = x > 0
    if np.any(y[mask] == 0):
        return float("inf")
    return float(np.sum(x[mask] * np.log(x[mask] / y[mask])))


def _mult_update(k, z, big_m):
    """normalize(k * min(exp(-z), big_m)) on flattened input."""
    shape = k.shape
    k = np.asarray(k, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite entries in the tilt vector")
    if np.any(k <= 0):
        raise ValueError("entropic update requires a strictly positive start")
    log_cap = np.log(big_m) if np.isfinite(big_m) else np.inf
    return backends.entropic_core(k, z, log_cap).reshape(shape)


def entropic_step(k: np.ndarray, g: np.ndarray, eta, big_m: float = np.inf) -> np.ndarray:
    """Multiplicative simplex update k_i <- k_i * min(exp(-eta_i g_i), M), renormalized.

    ``eta`` may be a scalar or per-coordinate array. The output is strictly
    positive and sums to 1.
    """
    eta = np.asarray(eta, dtype=np.float64)
    if np.any(eta <= 0):
        raise ValueError("step sizes must be positive")
    z = eta * np.asarray(g, dtype=np.float64)
    return _mult_update(k, z, big_m)


def kl_prox(k: np.ndarray, z: np.ndarray) -> np.ndarray:
    """argmin_{x in simplex} <z, x> + KL(x || k); closed form x_i ∝ k_i exp(-z_i)."""
    return _mult_update(k, z, np.inf)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the simplex (sort-and-threshold)."""
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite entries")
    return backends.project_simplex_core(v.ravel()).reshape(v.shape)


def three_point_gap(z: np.ndarray, x0: np.ndarray, y: np.ndarray) -> float:
    """Slack in the three-point inequality for the KL prox.

    With x* = kl_prox(x0, z), returns
    (<z, y> + KL(y || x0)) - (<z, x*> + KL(x* || x0) + KL(y || x*)),
    which is nonnegative up to floating-point noise for any y in the simplex.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    xs = kl_prox(x0, z)
    lhs = float(np.dot(z, y)) + kl(y, x0)
    rhs = float(np.dot(z, xs)) + kl(xs, x0) + kl(y, xs)
    return lhs - rhs
