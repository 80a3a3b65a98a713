"""Compare the numba and numpy backends of the hot kernels.

Run with ``python benchmarks/bench_kernels.py [--n-wigner N] [--grid N] [--repeat R]``.
Compilation happens once before timing; the first call is reported separately.
"""

import argparse
import time

import numpy as np

from wignerbell import _kernels
from wignerbell.lorentz import random_lorentz, random_momentum


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-wigner", type=int, default=20000)
    ap.add_argument("--grid", type=int, default=65)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    Ls = np.array([random_lorentz(rng)[0] for _ in range(args.n_wigner)])
    ps = np.array([random_momentum(rng, 1.0) for _ in range(args.n_wigner)])
    p3 = ps[:, 1:].copy()
    m = np.ones(args.n_wigner)
    n = args.grid
    f = rng.normal(size=(2, n, n, n)) + 1j * rng.normal(size=(2, n, n, n))

    print(f"backend selected at import: {_kernels.BACKEND}")
    results = {}
    for name, impl in _kernels.IMPLEMENTATIONS.items():
        t0 = time.perf_counter()
        impl["wigner_quats"](Ls[:2], p3[:2], m[:2])
        impl["central_difference"](f[:, :5, :5, :5], 0.1, 1)
        warm = time.perf_counter() - t0
        tw, q = best_of(lambda: impl["wigner_quats"](Ls, p3, m), args.repeat)
        tc, d = best_of(lambda: impl["central_difference"](f, 0.1, 2), args.repeat)
        results[name] = (q, d)
        print(f"{name:>6}: first call {warm * 1e3:8.1f} ms | wigner_quats x{args.n_wigner}: "
              f"{tw * 1e3:8.2f} ms | central_difference {n}^3: {tc * 1e3:8.2f} ms")

    if len(results) == 2:
        (qa, da), (qb, db) = results["numpy"], results["numba"]
        sign = np.sign(np.sum(qa * qb, axis=1))[:, None]
        print(f"max |quat numpy - numba| = {np.abs(qa - sign * qb).max():.2e}")
        print(f"max |diff numpy - numba| = {np.abs(da - db).max():.2e}")
    else:
        print("numba unavailable or disabled (WIGNERBELL_DISABLE_NUMBA); only numpy timed")


if __name__ == "__main__":
    main()
