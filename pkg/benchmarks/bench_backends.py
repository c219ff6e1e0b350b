"""Compare the numba-jitted kernels against the pure-numpy fallback.

Usage::

    python3 benchmarks/bench_backends.py [--size 256] [--kernel 27] [--reps 50]

Times each hot operation under both registered backends and prints the
median wall time plus the speedup ratio.  Run with ``PRIDA_NO_NUMBA=1``
to confirm the package itself falls back cleanly (this script always
times both implementations directly, regardless of the active backend).
"""

import argparse
import time

import numpy as np

from prida import backends


def _median_time(fn, args, reps):
    times = []
    fn(*args)  # warm-up (jit compilation for the numba variants)
    for _ in range(reps):
        tic = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - tic)
    return float(np.median(times))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=256, help="image side")
    ap.add_argument("--kernel", type=int, default=27, help="kernel side (odd)")
    ap.add_argument("--reps", type=int, default=50)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    f = rng.uniform(size=(args.size, args.size))
    r = rng.standard_normal((args.size, args.size))
    s = args.kernel
    k = rng.dirichlet(np.ones(s * s)).reshape(s, s)
    kv = np.maximum(rng.dirichlet(np.ones(s * s)), 1e-12)
    kv /= kv.sum()
    z = rng.normal(0, 5, size=s * s)
    v = rng.normal(0, 5, size=s * s)

    cases = {
        "conv2d_circular": (f, k),
        "conv2d_replicate": (f, k),
        "adjoint2d_circular": (k, r),
        "adjoint2d_replicate": (k, r),
        "gradk2d_circular": (f, r, s),
        "gradk2d_replicate": (f, r, s),
        "entropic_core": (kv, z, np.log(1000.0)),
        "project_simplex_core": (v,),
    }

    names = sorted(backends.IMPLEMENTATIONS)
    if len(names) < 2:
        print(f"only the {names[0]} backend is available; nothing to compare")
        return

    print(f"image {args.size}x{args.size}, kernel {s}x{s}, "
          f"{args.reps} reps, active backend: {backends.ACTIVE}")
    print(f"{'operation':<22}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}")
    for op, op_args in cases.items():
        t_np = _median_time(backends.IMPLEMENTATIONS["numpy"][op], op_args, args.reps)
        t_nb = _median_time(backends.IMPLEMENTATIONS["numba"][op], op_args, args.reps)
        print(f"{op:<22}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}"
              f"{t_np / max(t_nb, 1e-12):>8.1f}x")


if __name__ == "__main__":
    main()
