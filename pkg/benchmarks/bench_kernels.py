"""Time the numba and pure-numpy Wigner-d kernels on the workloads the package runs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads: full d-matrices for every block of an n_max = 30 input (CFI and
sampling) and single rows over a 2048-point phase grid (posterior likelihoods).
"""
import argparse
import time

import numpy as np

from qmzi import _kernels
from qmzi._accel import HAVE_NUMBA


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def matrices(d_matrix):
    for two_j in range(61):
        d_matrix(two_j, 1.234)


def rows(d_rows, grid):
    for two_j in range(0, 61, 10):
        for two_mp in range(-two_j, two_j + 1, 2):
            d_rows(two_j, two_mp, grid)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    grid = np.linspace(0.0, np.pi, 2048)
    impls = {"numpy": (_kernels.d_matrix_numpy, _kernels.d_rows_numpy)}
    if HAVE_NUMBA:
        impls["numba"] = (_kernels.d_matrix_numba, _kernels.d_rows_numba)
        # compile outside the timed region
        _kernels.d_matrix_numba(2, 0.1)
        _kernels.d_rows_numba(2, 0, grid)
    else:
        print("numba not installed; timing numpy only")

    print(f"{'backend':<8}{'matrices (s)':>14}{'grid rows (s)':>15}")
    results = {}
    for name, (dm, dr) in impls.items():
        tm = _best(lambda: matrices(dm), args.repeat)
        tr = _best(lambda: rows(dr, grid), args.repeat)
        results[name] = (tm, tr)
        print(f"{name:<8}{tm:>14.4f}{tr:>15.4f}")
    if "numba" in results:
        (nm, nr), (bm, br) = results["numpy"], results["numba"]
        print(f"speedup  {nm / bm:>13.1f}x{nr / br:>14.1f}x")
        err = max(np.max(np.abs(_kernels.d_matrix_numpy(j, 1.234) - _kernels.d_matrix_numba(j, 1.234)))
                  for j in range(61))
        print(f"max |numba - numpy| over 2j <= 60: {err:.2e}")


if __name__ == "__main__":
    main()
