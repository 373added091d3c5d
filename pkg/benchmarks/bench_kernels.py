"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from gidlab import _backend

LINNIK = 4


def cases(size):
    pts = np.linspace(-10, 10, 401)
    f = np.random.default_rng(0).standard_normal(size)
    w = np.full(size, 1.0 / size)
    return {
        "draw linnik(1.5)": lambda k: k.draw(LINNIK, 1.5, 1.0, np.random.default_rng(1), size),
        "geometric_counts p=0.01": lambda k: k.geometric_counts(0.01, np.random.default_rng(2),
                                                                size),
        "random_sums p=0.05": lambda k: k.random_sums(LINNIK, 1.5, 1.0, 0.05, 0,
                                                      np.random.default_rng(3),
                                                      np.random.default_rng(4), size // 20),
        "trig_sums 401 points": lambda k: k.trig_sums(pts, f, w, w),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _backend.available()
    print(f"size {args.size}, best of {args.repeat}; backends: {', '.join(backends)}")
    print(f"{'kernel':<26}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.size).items():
        times = {}
        for b in backends:
            kernels = _backend._BACKENDS[b]
            times[b] = min(timeit.repeat(lambda: fn(kernels), number=1, repeat=args.repeat))
        row = f"{name:<26}" + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        if len(times) == 2:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
