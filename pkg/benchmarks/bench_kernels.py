"""Time the compiled kernel lane against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 20]

Each kernel is timed on the saliency pipeline's actual shapes (64x64
working grid, plus a larger 256x256 case) with the best-of-N rule, and
the two lanes are cross-checked for agreement before timing.
"""

import argparse
import math
import time

import numpy as np

from semrel.kernels import _pure

try:
    from semrel.kernels import _core
except ImportError:
    _core = None


def best_of(repeats, fn, *args):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def gaussian_kernel(sigma, radius):
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def cases():
    rng = np.random.default_rng(0)
    kern = gaussian_kernel(2.0, 6)
    for size in (64, 256):
        grid = rng.uniform(size=(size, size))
        cgrid = grid.astype(np.complex128)
        yield (f"fft2 {size}x{size}", "fft2", (cgrid,))
        yield (f"blur {size}x{size}", "gaussian_blur_replicate", (grid, kern))
        yield (f"resize {size}->{size * 2}", "resize_bilinear",
               (grid, size * 2, size * 2))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    if _core is None:
        print("compiled lane unavailable; build the extension first "
              "(pip install -e . --no-build-isolation)")
        return 1

    print(f"{'case':<18} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for label, name, fargs in cases():
        pure_fn = getattr(_pure, name)
        core_fn = getattr(_core, name)
        a = np.asarray(pure_fn(*fargs))
        b = np.asarray(core_fn(*fargs))
        err = float(np.abs(a - b).max())
        if err > 1e-9:
            raise AssertionError(f"{label}: lanes disagree by {err:.2e}")
        t_pure = best_of(args.repeats, pure_fn, *fargs)
        t_core = best_of(args.repeats, core_fn, *fargs)
        print(f"{label:<18} {t_pure * 1e3:>10.3f}ms {t_core * 1e3:>10.3f}ms "
              f"{t_pure / t_core:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
