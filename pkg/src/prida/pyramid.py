"""Coarse-to-fine multiscale orchestration of the solver."""

import copy
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

from . import optimizer
from .types import Objective, SolverConfig, uniform_kernel

__all__ = [
    "PyramidPlan",
    "build_plan",
    "downscale_image",
    "upscale_image",
    "upscale_kernel",
    "solve_multiscale",
    "deblur",
]

DEFAULT_SCALE_FACTOR = 1.0 / np.sqrt(2.0)
KERNEL_FLOOR = 1e-12
MIN_KERNEL_SIDE = 3


@dataclass(frozen=True)
class PyramidPlan:
    levels: tuple  # ((height, width), kernel_side), coarsest first
    scale_factor: float


def _nearest_odd(x):
    return max(3, 2 * round((x - 1.0) / 2.0) + 1)


def build_plan(input_dims, kernel_side: int, scale_factor: float = DEFAULT_SCALE_FACTOR) -> PyramidPlan:
    """Plan levels so that repeated scaling brings the kernel side to 3.

    The kernel side shrinks by ``scale_factor`` per level, rounded to the
    nearest odd integer >= 3; image dimensions shrink geometrically with
    the same factor, floored so the kernel always fits.
    """
    if kernel_side % 2 == 0 or kernel_side < 1:
        raise ValueError(f"kernel side must be odd, got {kernel_side}")
    if not 0.0 < scale_factor < 1.0:
        raise ValueError("scale factor must lie in (0, 1)")
    H, W = input_dims
    if kernel_side > min(H, W):
        raise ValueError("kernel larger than image")

    sides = [kernel_side]
    while sides[-1] > MIN_KERNEL_SIDE:
        nxt = _nearest_odd(sides[-1] * scale_factor)
        if nxt >= sides[-1]:
            nxt = sides[-1] - 2
        sides.append(max(nxt, MIN_KERNEL_SIDE))
    # sides is finest -> coarsest
    levels = []
    for j, side in enumerate(sides):
        r = scale_factor ** j
        h = max(int(round(H * r)), side)
        w = max(int(round(W * r)), side)
        levels.append(((h, w), side))
    levels.reverse()
    return PyramidPlan(levels=tuple(levels), scale_factor=scale_factor)


def downscale_image(img: np.ndarray, new_dims) -> np.ndarray:
    """Anti-aliased (area-averaging) downscale."""
    h, w = new_dims
    if (h, w) == img.shape:
        return img.copy()
    im = PILImage.fromarray(img.astype(np.float32), mode="F")
    im = im.resize((w, h), PILImage.Resampling.BOX)
    return np.asarray(im, dtype=np.float64)


def upscale_image(img: np.ndarray, new_dims) -> np.ndarray:
    """Bilinear upscale with corner alignment (same dims -> identity)."""
    H, W = img.shape
    h, w = new_dims
    if h < H or w < W:
        raise ValueError("upscale_image cannot shrink")
    ys = np.zeros(h) if h == 1 else np.arange(h) * (H - 1) / (h - 1)
    xs = np.zeros(w) if w == 1 else np.arange(w) * (W - 1) / (w - 1)
    y0 = np.minimum(ys.astype(int), H - 2) if H > 1 else np.zeros(h, dtype=int)
    x0 = np.minimum(xs.astype(int), W - 2) if W > 1 else np.zeros(w, dtype=int)
    wy = (ys - y0)[:, None] if H > 1 else np.zeros((h, 1))
    wx = (xs - x0)[None, :] if W > 1 else np.zeros((1, w))
    y1 = np.minimum(y0 + 1, H - 1)
    x1 = np.minimum(x0 + 1, W - 1)
    top = img[np.ix_(y0, x0)] * (1 - wx) + img[np.ix_(y0, x1)] * wx
    bot = img[np.ix_(y1, x0)] * (1 - wx) + img[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bot * wy


def upscale_kernel(k: np.ndarray, new_side: int) -> np.ndarray:
    """Bilinear kernel upscale about the center, floored and renormalized."""
    if new_side % 2 == 0:
        raise ValueError("kernel side must be odd")
    old = k.shape[0]
    if new_side < old:
        raise ValueError("upscale_kernel cannot shrink")
    if new_side == old:
        out = k.copy()
    else:
        out = upscale_image(k, (new_side, new_side))
    out = np.maximum(out, KERNEL_FLOOR)
    return out / out.sum()


def solve_multiscale(b: np.ndarray, kernel_side: int, obj_params: dict | None = None,
                     cfg: SolverConfig | None = None,
                     scale_factor: float = DEFAULT_SCALE_FACTOR):
    """Coarse-to-fine blind deconvolution of ``b``.

    ``obj_params`` are the :class:`Objective` fields other than the blurred
    image. Returns ``(f, k, traces)`` with one trace per level, coarsest
    first; ``f`` is not clamped.
    """
    obj_params = dict(obj_params or {})
    cfg = cfg if cfg is not None else SolverConfig()
    plan = build_plan(b.shape, kernel_side, scale_factor)

    f = k = None
    traces = []
    for li, (dims, side) in enumerate(plan.levels):
        b_level = downscale_image(b, dims)
        if li == 0:
            f = b_level.copy()
            k = uniform_kernel(side)
        else:
            f = upscale_image(f, dims)
            k = upscale_kernel(k, side)
        obj = Objective(blurred=b_level, **obj_params)
        state = optimizer.solve(f, k, obj, cfg)
        f, k = state.f, state.k
        traces.append(state.trace)
    return f, k, traces


ESTIMATION_LAM = 6e-2
CONTINUATION_STAGES = 4
CONTINUATION_ITERS = 300
REFINE_ITERS = 1500


def deblur(b: np.ndarray, kernel_side: int, obj_params: dict | None = None,
           cfg: SolverConfig | None = None,
           scale_factor: float = DEFAULT_SCALE_FACTOR,
           estimation_lam: float = ESTIMATION_LAM):
    """Full blind-deconvolution pipeline: estimate, anneal, refine.

    The joint objective at the target regularization weight prefers the
    no-blur solution (f = b, delta kernel), so the kernel is estimated
    with a much stronger TV weight first, the weight is then annealed
    down to the target over a few warm-started joint stages, and the
    image is finally re-solved non-blind under the recovered kernel.

    Returns ``(f, k, traces)``: the multiscale traces followed by one
    trace per annealing stage and the final refinement trace.
    """
    obj_params = dict(obj_params or {})
    cfg = copy.copy(cfg) if cfg is not None else SolverConfig()
    lam = obj_params.pop("lam", Objective.lam)

    est_params = dict(obj_params, lam=max(estimation_lam, lam))
    est_cfg = copy.copy(cfg)
    est_cfg.max_iters = max(cfg.max_iters, 1000)
    est_cfg.tol_move = 0.0
    _, k, traces = solve_multiscale(b, kernel_side, est_params, est_cfg, scale_factor)

    # warm image for the annealing stages: quick non-blind solve
    refine_cfg = copy.copy(cfg)
    refine_cfg.freeze_k = True
    refine_cfg.tol_move = 0.0
    refine_cfg.max_iters = CONTINUATION_ITERS
    state = optimizer.solve(b, k, Objective(blurred=b, **dict(obj_params, lam=lam)), refine_cfg)
    f = state.f

    stage_cfg = copy.copy(cfg)
    stage_cfg.max_iters = CONTINUATION_ITERS
    stage_cfg.tol_move = 0.0
    lam_hi = est_params["lam"] / 3.0
    for stage in range(CONTINUATION_STAGES):
        if lam_hi <= lam or CONTINUATION_STAGES == 1:
            lam_stage = lam
        else:
            t = stage / (CONTINUATION_STAGES - 1)
            lam_stage = lam_hi * (lam / lam_hi) ** t
        obj = Objective(blurred=b, **dict(obj_params, lam=lam_stage))
        state = optimizer.solve(f, k, obj, stage_cfg)
        f, k = state.f, state.k
        traces.append(state.trace)

    refine_cfg.max_iters = REFINE_ITERS
    obj = Objective(blurred=b, **dict(obj_params, lam=lam))
    state = optimizer.solve(b, k, obj, refine_cfg)
    traces.append(state.trace)
    return state.f, k, traces
