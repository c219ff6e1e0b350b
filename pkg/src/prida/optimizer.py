"""PRIDA main loop (entropic mirror step on the kernel, gradient step on
the image) and the projected-gradient baseline.
"""

import copy
from dataclasses import dataclass, field

import numpy as np

from . import conv, simplex, tv
from .types import Objective, SolverConfig, Trace

__all__ = [
    "IterateState",
    "NumericalFailure",
    "objective_value",
    "estimate_lipschitz",
    "estimate_lipschitz_blocks",
    "prida_step",
    "pgd_step",
    "solve",
]

POWER_ITERS = 30
DESCENT_SLACK = 1e-12
KERNEL_FLOOR = 1e-18


class NumericalFailure(RuntimeError):
    """Objective became non-finite; carries the trace for diagnosis."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass
class IterateState:
    f: np.ndarray
    k: np.ndarray
    t: int = 0
    objective: float = np.nan
    trace: Trace = field(default_factory=Trace)


def objective_value(f, k, obj: Objective) -> float:
    return conv.data_term(f, k, obj) + obj.lam * tv.tv_value(f, obj.tv_variant, obj.tv_epsilon)


def estimate_lipschitz_blocks(f, k, obj: Objective, seed: int = 0):
    """Curvature estimates (L_f, L_k) for the two coordinate blocks.

    The image block is the spectral norm of its data-term Hessian block
    (power iteration on the composed forward/adjoint operator), doubled,
    plus the tv-smoothing curvature bound lam * 8 / eps.  The kernel
    block lives on the simplex, where the relevant curvature is the
    largest Hessian diagonal entry rather than the spectral norm.
    """
    rng = np.random.default_rng(seed)
    mode = obj.boundary
    s_side = k.shape[0]

    x = rng.standard_normal(f.shape)
    sigma_f = 0.0
    for _ in range(POWER_ITERS):
        y = conv.correlate(k, conv.convolve(x, k, mode), mode)
        sigma_f = float(np.linalg.norm(y))
        if sigma_f == 0.0:
            break
        x = y / sigma_f

    # Kernel block: the largest diagonal entry of the data-term Hessian,
    # 2 * max_i ||shift_i(f)||^2, matches the l1-geometry (simplex) curvature
    # that governs the mirror step; the spectral value over-caps it badly.
    diag = conv.correlate_kernel(f * f, np.ones_like(f), s_side, mode)
    sigma_k = float(diag.max())

    tv_curv = obj.lam * 8.0 / obj.tv_epsilon
    L_f = max(2.0 * sigma_f + tv_curv, 1e-12)
    L_k = max(2.0 * sigma_k, 1e-12)
    return L_f, L_k


def estimate_lipschitz(f, k, obj: Objective, seed: int = 0) -> float:
    """Spectral upper estimate of the blockwise objective curvature at (f, k).

    Power iteration on the composed forward/adjoint operator of each
    data-term Hessian block, doubled, plus the tv-smoothing curvature
    bound lam * 8 / eps.  Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    mode = obj.boundary
    s_side = k.shape[0]

    x = rng.standard_normal(f.shape)
    sigma_f = 0.0
    for _ in range(POWER_ITERS):
        y = conv.correlate(k, conv.convolve(x, k, mode), mode)
        sigma_f = float(np.linalg.norm(y))
        if sigma_f == 0.0:
            break
        x = y / sigma_f

    z = rng.standard_normal((s_side, s_side))
    sigma_k = 0.0
    for _ in range(POWER_ITERS):
        y = conv.correlate_kernel(f, conv.convolve(f, z, mode), s_side, mode)
        sigma_k = float(np.linalg.norm(y))
        if sigma_k == 0.0:
            break
        z = y / sigma_k

    tv_curv = obj.lam * 8.0 / obj.tv_epsilon
    return max(2.0 * sigma_f + tv_curv, 2.0 * sigma_k, 1e-12)


def _gradients(f, k, obj: Objective):
    g_f = conv.grad_f_data(f, k, obj) + obj.lam * tv.tv_grad(f, obj.tv_variant, obj.tv_epsilon)
    g_k = conv.grad_k_data(f, k, obj)
    return g_f, g_k


def _move(f_old, k_old, f_new, k_new):
    df = f_new - f_old
    dk = k_new - k_old
    return float(np.sqrt(np.sum(df * df) + np.sum(dk * dk)))


def _advance(state: IterateState, obj: Objective, cfg: SolverConfig, L_f, L_k):
    """One simultaneous update of (f, k); shared by both algorithms."""
    f, k = state.f, state.k
    g_f, g_k = _gradients(f, k, obj)
    if not (np.all(np.isfinite(g_f)) and np.all(np.isfinite(g_k))):
        raise NumericalFailure(
            f"gradient became non-finite at iteration {state.t}", state.trace
        )
    eta_f = 0.0 if cfg.freeze_f else 1.0 / L_f
    gk_flat = g_k.ravel()
    k_flat = k.ravel()

    gmax = float(np.max(np.abs(gk_flat)))
    if cfg.freeze_k or gmax == 0.0 or cfg.algorithm == "pgd":
        eta_k = np.full(k_flat.shape, 0.0 if cfg.freeze_k else 1.0 / L_k)
    else:
        # per-coordinate rule: large coordinates take short, safe steps,
        # small ones may jump (multiplier growth bounded by big_m)
        eta_k = cfg.alpha * float(k_flat.max()) / (np.maximum(k_flat, KERNEL_FLOOR) * gmax)

    def take(scale_f, scale_k):
        f_new = f if cfg.freeze_f else f - scale_f * eta_f * g_f
        if cfg.freeze_k:
            return f_new, k.copy()
        if cfg.algorithm == "prida":
            k_new = simplex.entropic_step(k_flat, gk_flat, scale_k * eta_k, cfg.big_m)
            k_new = np.maximum(k_new, KERNEL_FLOOR)
            k_new = k_new / k_new.sum()
        else:
            k_new = simplex.project_simplex(k_flat - scale_k * eta_k * gk_flat)
        return f_new, k_new.reshape(k.shape)

    def accepted(value):
        return value <= state.objective + DESCENT_SLACK * (1.0 + abs(state.objective))

    scale_f = scale_k = 1.0
    f_new, k_new = take(scale_f, scale_k)
    obj_new = objective_value(f_new, k_new, obj)

    if cfg.descent_fallback and not accepted(obj_new):
        # The image step 1/L_f is reliable for its block, so shrink the
        # heuristic kernel step first; shrink both only as a last resort.
        for _ in range(40):
            scale_k *= 0.5
            f_new, k_new = take(scale_f, scale_k)
            obj_new = objective_value(f_new, k_new, obj)
            if accepted(obj_new):
                break
        else:
            for _ in range(40):
                scale_f *= 0.5
                scale_k *= 0.5
                f_new, k_new = take(scale_f, scale_k)
                obj_new = objective_value(f_new, k_new, obj)
                if accepted(obj_new):
                    break
            else:
                f_new, k_new = f, k.copy()
                obj_new = state.objective
                scale_f = scale_k = 0.0

    eta_f_used = scale_f * eta_f
    eta_k_used = scale_k * eta_k

    if not np.isfinite(obj_new):
        raise NumericalFailure(
            f"objective became non-finite at iteration {state.t}", state.trace
        )

    move = _move(f, k, f_new, k_new)
    kl_step = simplex.kl(k_new, k)
    new = IterateState(f=f_new, k=k_new, t=state.t + 1, objective=obj_new, trace=state.trace)
    new.trace.append(obj_new, eta_f_used, float(np.max(eta_k_used)), move, kl_step)
    return new, move


def _blocks_for(f, k, obj, cfg):
    if cfg.lipschitz_estimate == "auto":
        return estimate_lipschitz_blocks(f, k, obj, cfg.seed)
    L = float(cfg.lipschitz_estimate)
    return L, L


def prida_step(state: IterateState, obj: Objective, cfg: SolverConfig) -> IterateState:
    cfg = copy.copy(cfg)
    cfg.algorithm = "prida"
    return _single_step(state, obj, cfg)


def pgd_step(state: IterateState, obj: Objective, cfg: SolverConfig) -> IterateState:
    cfg = copy.copy(cfg)
    cfg.algorithm = "pgd"
    return _single_step(state, obj, cfg)


def _single_step(state, obj, cfg):
    if np.isnan(state.objective):
        state.objective = objective_value(state.f, state.k, obj)
    L_f, L_k = _blocks_for(state.f, state.k, obj, cfg)
    new, _ = _advance(state, obj, cfg, L_f, L_k)
    return new


def solve(f0: np.ndarray, k0: np.ndarray, obj: Objective, cfg: SolverConfig) -> IterateState:
    """Run the configured algorithm from (f0, k0) until the iteration
    budget or the movement tolerance is reached."""
    state = IterateState(f=np.array(f0, dtype=np.float64), k=np.array(k0, dtype=np.float64))
    state.objective = objective_value(state.f, state.k, obj)
    if cfg.max_iters == 0:
        return state

    if cfg.tol_move is None:
        tol_move = 1e-7 * np.sqrt(f0.size + k0.size)
    else:
        tol_move = cfg.tol_move

    L_f, L_k = _blocks_for(state.f, state.k, obj, cfg)
    for it in range(cfg.max_iters):
        if cfg.relip_every and it > 0 and it % cfg.relip_every == 0:
            L_f, L_k = _blocks_for(state.f, state.k, obj, cfg)
        state, move = _advance(state, obj, cfg, L_f, L_k)
        if move < tol_move:
            break
    return state
