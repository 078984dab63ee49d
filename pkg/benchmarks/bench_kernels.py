"""Time each kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 3]

The numba timings exclude compilation (one warm-up call per kernel). Each
kernel's outputs are compared across backends before timing.
"""
import argparse
import time

import numpy as np

from klab import kernels

M = 1_000_003


def cases():
    rng = np.random.default_rng(1)
    xs = rng.integers(1, M, 200_000, dtype=np.int64)
    res = rng.integers(0, M, 200_000, dtype=np.int64)
    w = rng.standard_normal(200_000)
    r1 = rng.integers(0, 10007, 400, dtype=np.int64)
    r2 = rng.integers(0, 10007, 400, dtype=np.int64)
    w1, w2 = rng.standard_normal(400), rng.standard_normal(400)
    hist = np.zeros(100_003, dtype=np.int64)
    hist[rng.integers(0, 100_003, 2000)] = 1
    shifts = rng.integers(0, 100_003, 300, dtype=np.int64)
    factors = rng.integers(1, 10007, 50, dtype=np.int64)
    hist_q = np.zeros(10007, dtype=np.int64)
    hist_q[1] = 1
    return {
        "batch_inverse": lambda k: k.batch_inverse(xs, M),
        "expsum": lambda k: k.expsum(res, M),
        "expsum_weighted": lambda k: k.expsum_weighted(res, w, w, M),
        "bilinear_expsum": lambda k: k.bilinear_expsum(r1, w1, w1, r2, w2, w2, 10007),
        "cyclic_tally_step": lambda k: k.cyclic_tally_step(hist, shifts, 100_003),
        "product_tally_step": lambda k: k.product_tally_step(hist_q, factors, 10007),
        "lattice_count": lambda k: k.lattice_count(12345, M, 2_000_000, 5_000_000),
        "spf_sieve": lambda k: k.spf_sieve(2_000_000),
        "top_factors": lambda k: k.top_factors(kernels.spf_sieve(200_000), 200_000, 2),
        "smooth_count": lambda k: k.smooth_count(
            1, 1_000_001, np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29], dtype=np.int64), 29, 1000),
    }


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, float):
        return abs(a - b) <= 1e-9 * max(1.0, abs(a))
    return a == b


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "numba" not in backends:
        print("numba backend unavailable; nothing to compare")
        return
    nb, npy = backends["numba"], backends["numpy"]
    print(f"{'kernel':20s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}  agree")
    for name, call in cases().items():
        agree = same(call(nb), call(npy))
        t_nb = best_of(lambda: call(nb), args.repeat)
        t_np = best_of(lambda: call(npy), args.repeat)
        print(f"{name:20s} {1e3 * t_nb:10.2f} {1e3 * t_np:10.2f} {t_np / t_nb:8.1f}  {agree}")


if __name__ == "__main__":
    main()
