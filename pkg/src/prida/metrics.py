"""Quantitative evaluation: shift-aligned kernel endpoint error and PSNR."""

from dataclasses import dataclass

import numpy as np

__all__ = ["EvalReport", "endpoint_error", "psnr"]

PSNR_SENTINEL_DB = 99.0


@dataclass(frozen=True)
class EvalReport:
    endpoint_error: float
    psnr_db: float
    objective_final: float
    iters_total: int


def _embed_centered(k, side):
    out = np.zeros((side, side))
    s = k.shape[0]
    off = (side - s) // 2
    out[off:off + s, off:off + s] = k
    return out


def endpoint_error(k_rec: np.ndarray, k_true: np.ndarray) -> float:
    """Mean squared kernel difference after aligning by the integer shift
    that maximizes cross-correlation.

    Kernels of unequal side are zero-padded to the larger (odd) side; the
    mean is taken over that side squared. Alignment removes the
    translation ambiguity inherent to blind deconvolution.
    """
    side = max(k_rec.shape[0], k_true.shape[0])
    a = _embed_centered(k_rec, side)
    b = _embed_centered(k_true, side)
    # search all shifts with any overlap on a canvas large enough to hold them
    m = side  # max |shift| worth considering
    canvas = side + 2 * m
    A = np.zeros((canvas, canvas))
    A[m:m + side, m:m + side] = a
    best_score = -np.inf
    best = (0, 0)
    for dy in range(-m, m + 1):
        for dx in range(-m, m + 1):
            sub = A[m + dy:m + dy + side, m + dx:m + dx + side]
            score = float(np.sum(sub * b))
            if score > best_score + 1e-15:
                best_score = score
                best = (dy, dx)
    dy, dx = best
    sub = A[m + dy:m + dy + side, m + dx:m + dx + side]
    return float(np.sum((sub - b) ** 2) / (side * side))


def psnr(f_rec: np.ndarray, f_true: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0.

    Identical images get the finite sentinel value 99 dB so reports stay
    numeric.
    """
    if f_rec.shape != f_true.shape:
        raise ValueError("image dimensions differ")
    mse = float(np.mean((f_rec - f_true) ** 2))
    if mse == 0.0:
        return PSNR_SENTINEL_DB
    return float(10.0 * np.log10(1.0 / mse))
