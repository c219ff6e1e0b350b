import numpy as np
import pytest

from prida import conv, metrics, pyramid, synth
from prida.types import SolverConfig, uniform_kernel


def test_build_plan_minimal():
    plan = pyramid.build_plan((64, 64), 3)
    assert len(plan.levels) == 1
    assert plan.levels[0] == ((64, 64), 3)


def test_build_plan_13_sides():
    plan = pyramid.build_plan((128, 128), 13)
    sides = [side for _, side in plan.levels]
    assert sides == [3, 5, 7, 9, 13]
    assert plan.levels[-1][0] == (128, 128)


def test_build_plan_kernel_fits_every_level():
    plan = pyramid.build_plan((255, 255), 27)
    for (h, w), side in plan.levels:
        assert side <= min(h, w)
        assert side % 2 == 1 and side >= 3


def test_build_plan_rejects_even_kernel():
    with pytest.raises(ValueError):
        pyramid.build_plan((64, 64), 8)


def test_upscale_image_constant():
    img = np.full((4, 4), 0.5)
    out = pyramid.upscale_image(img, (9, 9))
    assert out.shape == (9, 9)
    assert np.max(np.abs(out - 0.5)) < 1e-12


def test_upscale_image_identity_same_dims():
    rng = np.random.default_rng(0)
    img = rng.uniform(size=(5, 6))
    assert np.max(np.abs(pyramid.upscale_image(img, (5, 6)) - img)) < 1e-15


def test_upscale_image_checkerboard_hand_value():
    img = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = pyramid.upscale_image(img, (3, 3))
    # align-corners bilinear: center is the average, midpoints are 0.5
    expect = np.array([[0.0, 0.5, 1.0], [0.5, 0.5, 0.5], [1.0, 0.5, 0.0]])
    assert np.max(np.abs(out - expect)) < 1e-14


def test_upscale_image_rejects_shrink():
    with pytest.raises(ValueError):
        pyramid.upscale_image(np.zeros((4, 4)), (3, 4))


def test_downscale_then_upscale_constant_identity():
    img = np.full((16, 16), 0.25)
    down = pyramid.downscale_image(img, (8, 8))
    up = pyramid.upscale_image(down, (16, 16))
    assert np.max(np.abs(up - 0.25)) < 1e-7


def test_upscale_kernel_identity_and_validation():
    k = uniform_kernel(3)
    assert np.max(np.abs(pyramid.upscale_kernel(k, 3) - k)) < 1e-15
    with pytest.raises(ValueError):
        pyramid.upscale_kernel(k, 4)
    with pytest.raises(ValueError):
        pyramid.upscale_kernel(uniform_kernel(5), 3)


def test_upscale_kernel_delta_symmetric():
    d = synth.make_delta_kernel(3)
    up = pyramid.upscale_kernel(d, 7)
    assert abs(up.sum() - 1.0) < 1e-12
    assert np.min(up) > 0.0
    assert np.max(np.abs(up - up[::-1, ::-1])) < 1e-9  # symmetric about center


def test_upscale_kernel_uniform_3_to_5():
    up = pyramid.upscale_kernel(uniform_kernel(3), 5)
    assert up.shape == (5, 5)
    assert abs(up.sum() - 1.0) < 1e-12
    assert np.min(up) > 0.0


def test_solve_multiscale_kernel_side_1():
    b = synth.make_test_image(16, seed=0)
    f, k, traces = pyramid.solve_multiscale(b, 1, cfg=SolverConfig(max_iters=5))
    assert k.shape == (1, 1)
    assert abs(k[0, 0] - 1.0) < 1e-12
    assert len(traces) == 1


def test_solve_multiscale_trace_count():
    f_true = synth.make_test_image(32, seed=2)
    k_true = synth.make_motion_kernel(5, angle=0.3)
    b = conv.convolve(f_true, k_true)
    cfg = SolverConfig(max_iters=10, tol_move=0.0)
    _, _, traces = pyramid.solve_multiscale(b, 5, cfg=cfg)
    plan = pyramid.build_plan(b.shape, 5)
    assert len(traces) == len(plan.levels)


def test_multiscale_vs_single_scale():
    # pyramid endpoint error from truth within 5x of a plain single-scale
    # cold solve at the finest level (self-referential ablation oracle);
    # in practice the pyramid is far better, not merely within 5x
    from prida import optimizer
    from prida.types import Objective
    f_true = synth.make_test_image(64, seed=3)
    k_true = synth.make_motion_kernel(9, angle=0.4)
    b = conv.convolve(f_true, k_true)
    _, k_ms, _ = pyramid.deblur(b, 9, cfg=SolverConfig(max_iters=300, tol_move=0.0))
    state = optimizer.solve(b, uniform_kernel(9), Objective(blurred=b),
                            SolverConfig(max_iters=1000, tol_move=0.0))
    ee_ms = metrics.endpoint_error(k_ms, k_true)
    ee_ss = metrics.endpoint_error(state.k, k_true)
    assert ee_ms <= 5.0 * ee_ss


def test_deblur_trace_layout():
    b = synth.make_test_image(24, seed=4)
    cfg = SolverConfig(max_iters=5)
    f, k, traces = pyramid.deblur(b, 3, cfg=cfg)
    plan = pyramid.build_plan(b.shape, 3)
    # pyramid levels + annealing stages + final refinement
    assert len(traces) == len(plan.levels) + pyramid.CONTINUATION_STAGES + 1
    assert k.shape == (3, 3)
    assert abs(k.sum() - 1.0) < 1e-9
