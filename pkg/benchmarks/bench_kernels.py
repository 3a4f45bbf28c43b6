"""Compare the compiled and numpy DTW kernels on square banded and full matrices.

    python benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from avalign.align import KERNELS, node_weights
from avalign.cost import band_limits, default_band_radius


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--delay-bias", action="store_true")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    backends = sorted(KERNELS)
    print(f"{'n':>6} {'band':>6} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n in args.sizes:
        for radius in (default_band_radius(n, n), None):
            lo, hi = band_limits(n, n, radius)
            values = np.full((n, n), np.inf)
            for i in range(n):
                values[i, lo[i] : hi[i] + 1] = rng.uniform(0, 1, hi[i] - lo[i] + 1)
            w = np.ascontiguousarray(node_weights(values, args.delay_bias))
            lo, hi = np.ascontiguousarray(lo, dtype=np.intp), np.ascontiguousarray(hi, dtype=np.intp)
            results = {b: best_time(lambda k=KERNELS[b]: k(w, lo, hi), args.repeat) for b in backends}
            same = len({KERNELS[b](w, lo, hi)[0].tobytes() for b in backends}) == 1
            row = f"{n:>6} {radius if radius is not None else 'full':>6} "
            row += " ".join(f"{results[b] * 1e3:>8.2f}ms" for b in backends)
            if "cython" in results:
                row += f"   {results['numpy'] / results['cython']:6.1f}x"
            print(row + ("" if same else "   MISMATCH"))


if __name__ == "__main__":
    main()
