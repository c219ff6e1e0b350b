"""2-D "same" convolution, its adjoint, and analytic data-term gradients.

Circular boundaries make the convolution exactly diagonal in the Fourier
basis, so large instances go through the FFT; small instances and the
replicate boundary use the direct kernels in :mod:`prida.backends`.
"""

import numpy as np

from . import backends

# Direct summation below these sizes, FFT above (circular mode only).
FFT_KERNEL_AREA = 49
FFT_IMAGE_AREA = 64 * 64


def _check_sizes(f, k):
    if k.shape[0] > min(f.shape):
        raise ValueError(
            f"kernel side {k.shape[0]} exceeds image dimensions {f.shape}"
        )


def _use_fft(f, k):
    return k.size >= FFT_KERNEL_AREA or f.size >= FFT_IMAGE_AREA


def _kernel_otf(k, shape):
    """Zero-pad the kernel to the image shape, centered at the origin."""
    s = k.shape[0]
    c = s // 2
    kp = np.zeros(shape)
    kp[:s, :s] = k
    kp = np.roll(kp, (-c, -c), axis=(0, 1))
    return np.fft.rfft2(kp)


def convolve(f: np.ndarray, k: np.ndarray, mode: str = "circular") -> np.ndarray:
    """Convolve an image with a centered kernel, output same size as ``f``."""
    _check_sizes(f, k)
    if mode == "circular":
        if _use_fft(f, k):
            return np.fft.irfft2(np.fft.rfft2(f) * _kernel_otf(k, f.shape), s=f.shape)
        return backends.conv2d_circular(f, k)
    if mode == "replicate":
        return backends.conv2d_replicate(f, k)
    raise ValueError(f"unknown boundary mode {mode!r}")


def correlate(k: np.ndarray, r: np.ndarray, mode: str = "circular") -> np.ndarray:
    """Adjoint of ``convolve(., k, mode)`` applied to ``r``."""
    _check_sizes(r, k)
    if mode == "circular":
        if _use_fft(r, k):
            return np.fft.irfft2(
                np.fft.rfft2(r) * np.conj(_kernel_otf(k, r.shape)), s=r.shape
            )
        return backends.adjoint2d_circular(k, r)
    if mode == "replicate":
        return backends.adjoint2d_replicate(k, r)
    raise ValueError(f"unknown boundary mode {mode!r}")


def correlate_kernel(f: np.ndarray, r: np.ndarray, s_side: int, mode: str = "circular") -> np.ndarray:
    """Adjoint of kernel-convolution: gradient of ``f * k`` w.r.t. the kernel.

    Returns the s_side x s_side array of inner products between ``r`` and
    the correspondingly shifted copies of ``f``.
    """
    if f.shape != r.shape:
        raise ValueError("image and residual dimensions differ")
    if mode == "circular":
        if f.size >= FFT_IMAGE_AREA or s_side * s_side >= FFT_KERNEL_AREA:
            C = np.fft.irfft2(np.fft.rfft2(r) * np.conj(np.fft.rfft2(f)), s=f.shape)
            c = s_side // 2
            idx = (np.arange(s_side) - c) % f.shape[0]
            jdx = (np.arange(s_side) - c) % f.shape[1]
            return C[np.ix_(idx, jdx)]
        return backends.gradk2d_circular(f, r, s_side)
    if mode == "replicate":
        return backends.gradk2d_replicate(f, r, s_side)
    raise ValueError(f"unknown boundary mode {mode!r}")


def residual(f, k, obj):
    if f.shape != obj.blurred.shape:
        raise ValueError("image and blurred-observation dimensions differ")
    return convolve(f, k, obj.boundary) - obj.blurred


def data_term(f: np.ndarray, k: np.ndarray, obj) -> float:
    """Squared residual norm ||f * k - b||_2^2."""
    r = residual(f, k, obj)
    return float(np.sum(r * r))


def grad_f_data(f: np.ndarray, k: np.ndarray, obj) -> np.ndarray:
    """Gradient of the data term w.r.t. the image: 2 * adj_k(f * k - b)."""
    return 2.0 * correlate(k, residual(f, k, obj), obj.boundary)


def grad_k_data(f: np.ndarray, k: np.ndarray, obj) -> np.ndarray:
    """Gradient of the data term w.r.t. the kernel, on its support."""
    return 2.0 * correlate_kernel(f, residual(f, k, obj), k.shape[0], obj.boundary)
