"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from sarlab import _kernels_py

try:
    from sarlab import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(n: int):
    rng = np.random.default_rng(0)
    th = np.linspace(-1.9, 1.9, 9)[1:-1]
    centers = rng.normal(size=n)
    outer = rng.normal(size=192)
    offsets = rng.normal(size=96) * 0.3
    weights = np.full(96, 1 / 96)
    uniforms = rng.random((2 * n, 2))
    return {
        "gaussian cells": lambda k: k.quantized_entropy_gaussian(centers, 0.4, th),
        "mixture 192x96": lambda k: k.quantized_entropy_mixture(outer, offsets, weights, 0.2, th),
        "box-muller": lambda k: k.box_muller(uniforms),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = {"python": _kernels_py}
    if _compiled is not None:
        backends["cython"] = _compiled
    else:
        print("compiled extension not built; timing the numpy backend only")
    print(f"{'kernel':<16}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.n).items():
        best = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                for b, k in backends.items()}
        speed = f"{best['python'] / best['cython']:9.2f}x" if "cython" in best else ""
        print(f"{name:<16}" + "".join(f"{best[b] * 1e3:10.1f}ms" for b in backends) + speed)


if __name__ == "__main__":
    main()
