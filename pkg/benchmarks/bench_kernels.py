"""Time the numba and numpy kernel backends on the hot loops.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--n-quad N] [--n-max N]

Each kernel is warmed up once (numba compiles on first call), then the best
of ``--repeat`` runs is reported together with the max deviation between the
two backends.
"""

import argparse
import time

import numpy as np

from reactpatch import _kernels
from reactpatch.disk_steklov import unit_grid


def best_of(fun, repeat):
    fun()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fun()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n-quad", type=int, default=800)
    ap.add_argument("--n-max", type=int, default=2000)
    args = ap.parse_args()

    if _kernels.NUMBA_KERNELS is None:
        raise SystemExit("numba is not installed; nothing to compare")
    grid = unit_grid(args.n_quad)
    x_leg = np.polynomial.legendre.leggauss(args.n_max + 2)[0]
    kp = np.linspace(1e-12, 1.0, 200_000)
    cases = {
        "nystrom_matrix": lambda k: k["nystrom_matrix"](grid, grid),
        "legendre_table": lambda k: k["legendre_table"](args.n_max, x_leg),
        "ellipk_cm": lambda k: k["ellipk_cm"](kp),
    }
    print(f"{'kernel':<16}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, case in cases.items():
        t_np = best_of(lambda: case(_kernels.NUMPY_KERNELS), args.repeat)
        t_nb = best_of(lambda: case(_kernels.NUMBA_KERNELS), args.repeat)
        diff = np.max(np.abs(case(_kernels.NUMPY_KERNELS) - case(_kernels.NUMBA_KERNELS)))
        print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.2f}{diff:>14.3e}")


if __name__ == "__main__":
    main()
