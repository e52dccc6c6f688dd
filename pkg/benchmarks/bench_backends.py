"""Throughput of the compiled and numpy partial-sum kernels.

Usage: python benchmarks/bench_backends.py [--n 1024] [--sums 2000] [--repeat 3]

Both backends consume the same uniform stream, so the script also reports
the largest difference between their outputs.
"""
import argparse
import time

import numpy as np

from stablestein import bench, domains
from stablestein import _pykernels

try:
    from stablestein import _ckernels
except ImportError:
    _ckernels = None

LAWS = {
    "pareto": dict(alpha=1.5, beta=0.0),
    "twopower": dict(alpha=1.5, beta=0.0, alpha_tilde=1.8),
    "trig": dict(alpha=1.5, beta=0.0, B=0.1),
    "logtail": dict(alpha=1.5, beta=0.0, D=0.5),
    "slowvary": dict(alpha=1.5),
}


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--sums", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    draws = args.n * args.sums
    key = bench.stream_key(0, args.n, 0)
    print(f"{'law':10s} {'python Mdraw/s':>15s} {'cython Mdraw/s':>15s} {'speedup':>8s} {'max diff':>10s}")
    for tag, kw in LAWS.items():
        law = domains.make_example(tag, **kw)
        family, params = bench.kernel_parameters(law)
        center, scale = bench.normalization(law, args.n)
        call = lambda mod: mod.partial_sums(family, params, args.n, args.sums, key, center, scale, 0)
        tp, xp = best_time(lambda: call(_pykernels), args.repeat)
        line = f"{tag:10s} {draws / tp / 1e6:15.2f}"
        if _ckernels is None:
            print(line + f" {'n/a':>15s}")
            continue
        tc, xc = best_time(lambda: call(_ckernels), args.repeat)
        diff = float(np.max(np.abs(xc - xp)))
        print(line + f" {draws / tc / 1e6:15.2f} {tp / tc:8.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
