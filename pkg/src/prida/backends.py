"""Hot inner loops with numba acceleration and a pure-numpy fallback.

Set the environment variable ``PRIDA_NO_NUMBA=1`` to force the numpy
implementations. The module-level names (``conv2d_circular`` etc.) are
bound to the active backend at import time; both backends are kept
importable in ``IMPLEMENTATIONS`` so they can be benchmarked against
each other (see ``benchmarks/bench_backends.py``).
"""

import os

import numpy as np

__all__ = [
    "ACTIVE",
    "IMPLEMENTATIONS",
    "conv2d_circular",
    "conv2d_replicate",
    "adjoint2d_circular",
    "adjoint2d_replicate",
    "gradk2d_circular",
    "gradk2d_replicate",
    "entropic_core",
    "project_simplex_core",
]


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_conv2d_circular(f, k):
    s = k.shape[0]
    c = s // 2
    out = np.zeros_like(f)
    for u in range(s):
        for v in range(s):
            out += k[u, v] * np.roll(f, (u - c, v - c), axis=(0, 1))
    return out


def _np_conv2d_replicate(f, k):
    H, W = f.shape
    s = k.shape[0]
    c = s // 2
    out = np.zeros_like(f)
    for u in range(s):
        iy = np.clip(np.arange(H) - (u - c), 0, H - 1)
        for v in range(s):
            ix = np.clip(np.arange(W) - (v - c), 0, W - 1)
            out += k[u, v] * f[np.ix_(iy, ix)]
    return out


def _np_adjoint2d_circular(k, r):
    s = k.shape[0]
    c = s // 2
    out = np.zeros_like(r)
    for u in range(s):
        for v in range(s):
            out += k[u, v] * np.roll(r, (-(u - c), -(v - c)), axis=(0, 1))
    return out


def _np_adjoint2d_replicate(k, r):
    # True adjoint of the clamped-index convolution: boundary contributions
    # are scattered back onto the clamped source pixel.
    H, W = r.shape
    s = k.shape[0]
    c = s // 2
    out = np.zeros_like(r)
    for u in range(s):
        py = np.clip(np.arange(H) - (u - c), 0, H - 1)
        for v in range(s):
            px = np.clip(np.arange(W) - (v - c), 0, W - 1)
            np.add.at(out, (py[:, None], px[None, :]), k[u, v] * r)
    return out


def _np_gradk2d_circular(f, r, s):
    c = s // 2
    gk = np.empty((s, s))
    for u in range(s):
        for v in range(s):
            gk[u, v] = np.sum(r * np.roll(f, (u - c, v - c), axis=(0, 1)))
    return gk


def _np_gradk2d_replicate(f, r, s):
    H, W = f.shape
    c = s // 2
    gk = np.empty((s, s))
    for u in range(s):
        iy = np.clip(np.arange(H) - (u - c), 0, H - 1)
        for v in range(s):
            ix = np.clip(np.arange(W) - (v - c), 0, W - 1)
            gk[u, v] = np.sum(r * f[np.ix_(iy, ix)])
    return gk


def _np_entropic_core(k, z, log_cap):
    # normalize(k * min(exp(-z), exp(log_cap))), computed in log-space so the
    # update stays finite for any finite z.
    t = np.minimum(-z, log_cap)
    lw = np.log(k) + t
    lw -= lw.max()
    w = np.exp(lw)
    return w / w.sum()


def _np_project_simplex_core(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.shape[0] + 1, dtype=np.float64)
    cond = u + (1.0 - css) / idx > 0.0
    rho = np.nonzero(cond)[0][-1]
    tau = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


_NUMPY = {
    "conv2d_circular": _np_conv2d_circular,
    "conv2d_replicate": _np_conv2d_replicate,
    "adjoint2d_circular": _np_adjoint2d_circular,
    "adjoint2d_replicate": _np_adjoint2d_replicate,
    "gradk2d_circular": _np_gradk2d_circular,
    "gradk2d_replicate": _np_gradk2d_replicate,
    "entropic_core": _np_entropic_core,
    "project_simplex_core": _np_project_simplex_core,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

_NUMBA = None
_disabled = os.environ.get("PRIDA_NO_NUMBA", "").strip() not in ("", "0")

if not _disabled:
    try:
        from numba import njit
    except ImportError:
        njit = None

    if njit is not None:

        @njit(cache=True)
        def _nb_conv2d_circular(f, k):
            H, W = f.shape
            s = k.shape[0]
            c = s // 2
            out = np.zeros((H, W))
            for y in range(H):
                for x in range(W):
                    acc = 0.0
                    for u in range(s):
                        yy = (y - u + c) % H
                        for v in range(s):
                            xx = (x - v + c) % W
                            acc += k[u, v] * f[yy, xx]
                    out[y, x] = acc
            return out

        @njit(cache=True)
        def _nb_conv2d_replicate(f, k):
            H, W = f.shape
            s = k.shape[0]
            c = s // 2
            out = np.zeros((H, W))
            for y in range(H):
                for x in range(W):
                    acc = 0.0
                    for u in range(s):
                        yy = y - u + c
                        if yy < 0:
                            yy = 0
                        elif yy > H - 1:
                            yy = H - 1
                        for v in range(s):
                            xx = x - v + c
                            if xx < 0:
                                xx = 0
                            elif xx > W - 1:
                                xx = W - 1
                            acc += k[u, v] * f[yy, xx]
                    out[y, x] = acc
            return out

        @njit(cache=True)
        def _nb_adjoint2d_circular(k, r):
            H, W = r.shape
            s = k.shape[0]
            c = s // 2
            out = np.zeros((H, W))
            for y in range(H):
                for x in range(W):
                    acc = 0.0
                    for u in range(s):
                        yy = (y + u - c) % H
                        for v in range(s):
                            xx = (x + v - c) % W
                            acc += k[u, v] * r[yy, xx]
                    out[y, x] = acc
            return out

        @njit(cache=True)
        def _nb_adjoint2d_replicate(k, r):
            H, W = r.shape
            s = k.shape[0]
            c = s // 2
            out = np.zeros((H, W))
            for y in range(H):
                for x in range(W):
                    rv = r[y, x]
                    for u in range(s):
                        py = y - u + c
                        if py < 0:
                            py = 0
                        elif py > H - 1:
                            py = H - 1
                        for v in range(s):
                            px = x - v + c
                            if px < 0:
                                px = 0
                            elif px > W - 1:
                                px = W - 1
                            out[py, px] += k[u, v] * rv
            return out

        @njit(cache=True)
        def _nb_gradk2d_circular(f, r, s):
            H, W = f.shape
            c = s // 2
            gk = np.zeros((s, s))
            for u in range(s):
                for v in range(s):
                    acc = 0.0
                    for y in range(H):
                        yy = (y - u + c) % H
                        for x in range(W):
                            xx = (x - v + c) % W
                            acc += r[y, x] * f[yy, xx]
                    gk[u, v] = acc
            return gk

        @njit(cache=True)
        def _nb_gradk2d_replicate(f, r, s):
            H, W = f.shape
            c = s // 2
            gk = np.zeros((s, s))
            for u in range(s):
                for v in range(s):
                    acc = 0.0
                    for y in range(H):
                        yy = y - u + c
                        if yy < 0:
                            yy = 0
                        elif yy > H - 1:
                            yy = H - 1
                        for x in range(W):
                            xx = x - v + c
                            if xx < 0:
                                xx = 0
                            elif xx > W - 1:
                                xx = W - 1
                            acc += r[y, x] * f[yy, xx]
                    gk[u, v] = acc
            return gk

        @njit(cache=True)
        def _nb_entropic_core(k, z, log_cap):
            s = k.shape[0]
            lw = np.empty(s)
            m = -1.0e308
            for i in range(s):
                t = -z[i]
                if t > log_cap:
                    t = log_cap
                lw[i] = np.log(k[i]) + t
                if lw[i] > m:
                    m = lw[i]
            tot = 0.0
            for i in range(s):
                lw[i] = np.exp(lw[i] - m)
                tot += lw[i]
            for i in range(s):
                lw[i] /= tot
            return lw

        @njit(cache=True)
        def _nb_project_simplex_core(v):
            n = v.shape[0]
            u = np.sort(v)[::-1]
            css = 0.0
            rho = 0
            tau = 0.0
            for j in range(n):
                css += u[j]
                t = (css - 1.0) / (j + 1.0)
                if u[j] - t > 0.0:
                    rho = j
                    tau = t
            out = np.empty(n)
            for i in range(n):
                w = v[i] - tau
                out[i] = w if w > 0.0 else 0.0
            return out

        _NUMBA = {
            "conv2d_circular": _nb_conv2d_circular,
            "conv2d_replicate": _nb_conv2d_replicate,
            "adjoint2d_circular": _nb_adjoint2d_circular,
            "adjoint2d_replicate": _nb_adjoint2d_replicate,
            "gradk2d_circular": _nb_gradk2d_circular,
            "gradk2d_replicate": _nb_gradk2d_replicate,
            "entropic_core": _nb_entropic_core,
            "project_simplex_core": _nb_project_simplex_core,
        }


IMPLEMENTATIONS = {"numpy": _NUMPY}
if _NUMBA is not None:
    IMPLEMENTATIONS["numba"] = _NUMBA

ACTIVE = "numba" if _NUMBA is not None else "numpy"
_impl = IMPLEMENTATIONS[ACTIVE]

conv2d_circular = _impl["conv2d_circular"]
conv2d_replicate = _impl["conv2d_replicate"]
adjoint2d_circular = _impl["adjoint2d_circular"]
adjoint2d_replicate = _impl["adjoint2d_replicate"]
gradk2d_circular = _impl["gradk2d_circular"]
gradk2d_replicate = _impl["gradk2d_replicate"]
entropic_core = _impl["entropic_core"]
project_simplex_core = _impl["project_simplex_core"]
