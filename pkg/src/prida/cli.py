"""Batch command-line front end.

Exit codes: 0 success, 1 I/O error, 2 numerical failure, 3 property
violation (stability suite). ``PRIDA_THREADS`` caps bench fan-out.
"""

import argparse
import concurrent.futures
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import conv, metrics, optimizer, pyramid, robustness, simplex, synth
from .types import (Objective, SolverConfig, load_image, save_image,
                    save_kernel_txt, uniform_kernel)


def _csv_write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\r\n")
        for row in rows:
            fh.write(",".join(row) + "\r\n")


def _fmt(x):
    return repr(float(x))


def _solver_config(args):
    return SolverConfig(
        algorithm=args.algo,
        max_iters=args.iters,
        alpha=args.alpha,
        big_m=args.big_m,
        tol_move=args.tol_move,
        seed=args.seed,
    )


def _obj_params(args):
    return {
        "lam": args.lam,
        "tv_variant": args.tv_variant,
        "boundary": args.boundary,
        "tv_epsilon": args.tv_eps,
    }


def _add_common(p):
    p.add_argument("--lambda", dest="lam", type=float, default=6e-4,
                   help="TV regularization weight")
    p.add_argument("--kernel-size", type=int, default=27)
    p.add_argument("--algo", choices=["prida", "pgd"], default="prida")
    p.add_argument("--big-m", type=float, default=1000.0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--iters", type=int, default=300, help="iterations per pyramid level")
    p.add_argument("--tol-move", type=float, default=None)
    p.add_argument("--tv-variant", choices=["anisotropic_p1", "isotropic_p2"],
                   default="isotropic_p2")
    p.add_argument("--tv-eps", type=float, default=1e-3)
    p.add_argument("--boundary", choices=["circular", "replicate"], default="circular")
    p.add_argument("--scale-factor", type=float, default=pyramid.DEFAULT_SCALE_FACTOR)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("prida_out"))


def cmd_deblur(args) -> int:
    try:
        b = load_image(args.input)
    except (IOError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args.out.mkdir(parents=True, exist_ok=True)
    cfg = _solver_config(args)
    try:
        f, k, traces = pyramid.deblur(
            b, args.kernel_size, obj_params=_obj_params(args), cfg=cfg,
            scale_factor=args.scale_factor, estimation_lam=args.estimation_lam,
        )
    except optimizer.NumericalFailure as exc:
        exc.trace.write_csv(args.out / "trace_failure.csv")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    try:
        save_image(f, args.out / "recovered.png")
        save_kernel_txt(k, args.out / "kernel.txt")
        save_image(k / k.max() if k.max() > 0 else k, args.out / "kernel.png")
        for li, tr in enumerate(traces):
            tr.write_csv(args.out / f"trace_L{li}.csv")
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}/recovered.png ({len(traces)} solve stages)")
    return 0


def _bench_instance(args, seed):
    f_true = synth.make_test_image(args.size, seed=seed)
    k_true = synth.make_motion_kernel(args.kernel_size,
                                      angle=0.3 + 0.7 * (seed % 5), length=args.kernel_size - 2)
    return f_true, k_true


def cmd_bench_convergence(args) -> int:
    f_true, k_true = _bench_instance(args, args.seed)
    b = conv.convolve(f_true, k_true, args.boundary)
    args.out.mkdir(parents=True, exist_ok=True)

    # warm-start at the finest level from the coarse pyramid levels
    plan = pyramid.build_plan(b.shape, args.kernel_size, args.scale_factor)
    warm_cfg = _solver_config(args)
    f = k = None
    for li, (dims, side) in enumerate(plan.levels[:-1]):
        b_level = pyramid.downscale_image(b, dims)
        if li == 0:
            f, k = b_level.copy(), uniform_kernel(side)
        else:
            f, k = pyramid.upscale_image(f, dims), pyramid.upscale_kernel(k, side)
        obj = Objective(blurred=b_level, **_obj_params(args))
        st = optimizer.solve(f, k, obj, warm_cfg)
        f, k = st.f, st.k
    dims, side = plan.levels[-1]
    if f is None:
        f, k = pyramid.downscale_image(b, dims), uniform_kernel(side)
    else:
        f, k = pyramid.upscale_image(f, dims), pyramid.upscale_kernel(k, side)
    obj = Objective(blurred=b, **_obj_params(args))

    columns = {}
    for algo in ("prida", "pgd"):
        cfg = _solver_config(args)
        cfg.algorithm = algo
        cfg.max_iters = args.bench_iters
        cfg.tol_move = 0.0  # fixed-iteration benchmark mode
        state = optimizer.solve(f, k, obj, cfg)
        columns[algo] = state.trace.objective

    rows = [[str(t), _fmt(columns["prida"][t]), _fmt(columns["pgd"][t])]
            for t in range(args.bench_iters)]
    path = args.out / "convergence.csv"
    _csv_write(path, ["t", "objective_prida", "objective_pgd"], rows)
    print(f"wrote {path}")
    return 0


def cmd_bench_noise(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    algos = args.algos.split(",")
    seeds = [args.seed + i for i in range(args.instances)]
    max_workers = max(1, int(os.environ.get("PRIDA_THREADS", "1")))

    def run(task):
        algo, seed = task
        f_true, k_true = _bench_instance(args, seed)
        cfg = _solver_config(args)
        cfg.algorithm = algo
        return algo, seed, robustness.noise_sweep(
            f_true, k_true, sigmas, obj_params=_obj_params(args), cfg=cfg,
            seed=seed, boundary=args.boundary)

    tasks = [(algo, seed) for algo in algos for seed in seeds]
    if max_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as ex:
            results = list(ex.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    rows, timing_rows = [], []
    for algo, seed, sweep in results:
        for row in sweep:
            key = [algo, str(seed), _fmt(row["sigma"]), _fmt(row["sigma"] * 255.0)]
            rows.append(key + [_fmt(row["endpoint_error"]), _fmt(row["psnr"])])
            timing_rows.append(key + [_fmt(row["runtime_s"])])
    header = ["algo", "instance_seed", "sigma_intensity", "sigma_255"]
    _csv_write(args.out / "noise_sweep.csv", header + ["endpoint_error", "psnr"], rows)
    # runtimes are inherently nondeterministic; kept out of the main CSV
    _csv_write(args.out / "noise_sweep_timings.csv", header + ["runtime_s"], timing_rows)
    print(f"wrote {args.out}/noise_sweep.csv")
    return 0


def cmd_bench_stability(args) -> int:
    rng = np.random.default_rng(args.seed)
    sizes = [4, 169, 729]
    rows = []
    violations = 0
    for trial in range(args.trials):
        s = sizes[trial % len(sizes)]
        k0 = np.full(s, 1.0 / s)
        if trial % 4 == 3:
            # tight configuration: zero gradient, alternating +-abar noise
            g = np.zeros(s)
            abar = 10.0 ** rng.uniform(-4, -2)
            eta = rng.uniform(0.1, 1.0) / abar
            alpha_vec = np.where(np.arange(s) % 2 == 0, abar, -abar)
        else:
            g = rng.normal(0.0, 10.0 ** rng.uniform(-2, 2), size=s)
            abar = 10.0 ** rng.uniform(-6, 0)  # eta * abar <= 1 regime at eta <= 1
            eta = rng.uniform(0.0, 1.0) / abar
            alpha_vec = rng.uniform(-abar, abar, size=s)
            i = rng.integers(s)
            alpha_vec[i] = abar if rng.random() < 0.5 else -abar
        lhs, rhs = robustness.stability_trial(k0, g, alpha_vec, eta)
        rhs *= args.rhs_scale
        ok = lhs <= rhs + 1e-12
        if not ok:
            violations += 1
            print(f"violation: trial={trial} s={s} eta={eta!r} "
                  f"abar={abar!r} lhs={lhs!r} rhs={rhs!r}", file=sys.stderr)
        rows.append([str(trial), str(s), _fmt(eta), _fmt(abar), _fmt(lhs), _fmt(rhs),
                     "1" if ok else "0"])
    args.out.mkdir(parents=True, exist_ok=True)
    _csv_write(args.out / "stability.csv",
               ["trial", "s", "eta", "alpha_max", "lhs_l1", "rhs_bound", "ok"], rows)
    print(f"{args.trials} trials, {violations} violations")
    return 3 if violations else 0


def cmd_selftest(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    worst = 0.0
    for _ in range(200):
        s = int(rng.integers(2, 20))
        k = rng.dirichlet(np.ones(s))
        k = np.maximum(k, 1e-12)
        k /= k.sum()
        g = rng.normal(0, 10, size=s)
        eta = 10.0 ** rng.uniform(-3, 1)
        a = simplex.entropic_step(k, g, eta)
        b = simplex.kl_prox(k, eta * g)
        worst = max(worst, float(np.max(np.abs(a - b))))
    check("prox equivalence (1e-12)", worst <= 1e-12)

    worst = 0.0
    for _ in range(200):
        s = int(rng.integers(2, 20))
        z = rng.normal(0, 5, size=s)
        x0 = np.maximum(rng.dirichlet(np.ones(s)), 1e-9)
        x0 /= x0.sum()
        y = rng.dirichlet(np.ones(s))
        worst = min(worst, simplex.three_point_gap(z, x0, y))
    check("three-point inequality (-1e-10)", worst >= -1e-10)

    ok = True
    for _ in range(200):
        s = int(rng.integers(2, 20))
        x = rng.dirichlet(np.ones(s))
        y = np.maximum(rng.dirichlet(np.ones(s)), 1e-12)
        y /= y.sum()
        if simplex.kl(x, y) < 0.5 * np.sum(np.abs(x - y)) ** 2 - 1e-12:
            ok = False
    check("Pinsker inequality", ok)

    ok = True
    for _ in range(500):
        s = int(rng.integers(2, 200))
        k0 = np.full(s, 1.0 / s)
        g = rng.normal(0, 10, size=s)
        abar = 10.0 ** rng.uniform(-4, 0)
        eta = rng.uniform(0, 1) / abar
        av = rng.uniform(-abar, abar, size=s)
        lhs, rhs = robustness.stability_trial(k0, g, av, eta)
        if lhs > rhs + 1e-12:
            ok = False
    check("one-step stability bound", ok)

    return 3 if failures else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="prida", description="TV-regularized blind deconvolution")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deblur", help="deblur a single image")
    p.add_argument("--input", required=True, type=Path)
    _add_common(p)
    p.add_argument("--estimation-lambda", dest="estimation_lam", type=float,
                   default=pyramid.ESTIMATION_LAM,
                   help="TV weight for the kernel-estimation phase")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("bench-convergence", help="objective traces for both algorithms")
    _add_common(p)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--bench-iters", type=int, default=1000)
    p.set_defaults(func=cmd_bench_convergence, kernel_size=9)

    p = sub.add_parser("bench-noise", help="endpoint error vs noise level")
    _add_common(p)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--sigmas", default="0.00392156862745098,0.011764705882352941,"
                   "0.0196078431372549,0.027450980392156862,0.03529411764705882",
                   help="comma-separated noise std-devs in intensity units "
                        "(default {1,3,5,7,9}/255)")
    p.add_argument("--algos", default="prida,pgd")
    p.add_argument("--instances", type=int, default=3)
    p.set_defaults(func=cmd_bench_noise, kernel_size=9)

    p = sub.add_parser("bench-stability", help="randomized one-step stability suite")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("prida_out"))
    p.add_argument("--rhs-scale", type=float, default=1.0,
                   help="fault-injection scale on the certified bound")
    p.set_defaults(func=cmd_bench_stability)

    p = sub.add_parser("selftest", help="quick property checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
