"""Wall-clock comparison of the compiled and pure-Python transport steppers.

Usage::

    python benchmarks/bench_kinetic.py [--modes 50 200 800] [--t-final 95.5] [--dt 0.01] [--repeat 3]

Prints the best-of-``repeat`` time per backend and mode count, the speedup,
and the maximum difference between the two occupation series.
"""
import argparse
import math
import time

import numpy as np

from ncdyn import _kernels
from ncdyn.kinetic import ContinuumBand, ReservoirSpec, nonmarkovian_solve


def best_time(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--modes", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--t-final", type=float, default=95.5)
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = sorted(_kernels.BACKENDS)
    print(f"available backends: {', '.join(backends)} (default: {_kernels.BACKEND})")
    print(f"{'modes':>6} {'steps':>7} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + f" {'speedup':>8} {'max|dn|':>9}")
    steps = int(math.ceil(args.t_final / args.dt))
    for n_modes in args.modes:
        spec = ReservoirSpec.from_band(1.0, ContinuumBand(math.sqrt(0.1), 1.0, 20.0, 0.2, n_modes))
        times, series = {}, {}
        for b in backends:
            times[b], series[b] = best_time(
                lambda b=b: nonmarkovian_solve(spec, 1.0, 0.0, args.t_final, args.dt, backend=b), args.repeat
            )
        if len(backends) == 2:
            speed = f"{times['python'] / times['cython']:8.1f}"
            diff = f"{np.max(np.abs(series['python'].n - series['cython'].n)):9.1e}"
        else:
            speed, diff = f"{'-':>8}", f"{'-':>9}"
        print(f"{n_modes:>6} {steps:>7} " + " ".join(f"{times[b]:12.4f}" for b in backends) + f" {speed} {diff}")


if __name__ == "__main__":
    main()
