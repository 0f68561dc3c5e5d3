"""Compare the numba and pure-numpy kernel builds.

Each kernel is run once on both builds to compile and warm caches, then timed
over ``--repeat`` calls. The best wall time per call is reported.
"""

import argparse
import time

import numpy as np

from projsphere._kernels import build_kernels


def best_time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def cases(rng, points, steps):
    P = rng.normal(size=(points, 3))
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    Q = rng.normal(size=(points, 3))
    Q /= np.linalg.norm(Q, axis=1, keepdims=True)

    x0 = np.array([1.0, 0.0, 0.0])
    v0 = np.array([0.0, 0.0, 1.0])
    w = np.array([0.0, 0.2, 0.1])
    C = np.array([[0.0, 0.3, 0.0], [-0.3, 0.0, 0.0], [0.0, 0.0, 0.0]])

    M = rng.integers(-1, 2, size=(80, 80)).astype(float)
    return {
        "frechet": lambda k: (k.frechet, (P, Q)),
        "rk4_randers": lambda k: (k.rk4_randers, (x0, v0, w, C, 1e-3, steps)),
        "elimination_rank": lambda k: (k.elimination_rank, (M, 1e-9)),
        "lu_det": lambda k: (k.lu_det, (M,)),
    }


def main():
    parser = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    parser.add_argument("--points", type=int, default=1024, help="samples per Frechet curve")
    parser.add_argument("--steps", type=int, default=6284, help="RK4 steps")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    builds = {"numpy": build_kernels(jit=False), "numba": build_kernels(jit=True)}
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, make in cases(rng, args.points, args.steps).items():
        t = {label: best_time(*make(k), args.repeat) for label, k in builds.items()}
        print(f"{name:<18}{t['numpy'] * 1e3:>12.3f}{t['numba'] * 1e3:>12.3f}"
              f"{t['numpy'] / t['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
