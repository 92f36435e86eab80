"""Hot numeric kernels: compiled core with a pure-numpy fallback.

The Cython extension (semrel.kernels._core) is preferred when importable;
otherwise, or when the environment variable SEMREL_KERNELS=pure is set, the
numpy lane in _pure is used. Both lanes implement the same contracts; parity
is asserted in tests and timed in benchmarks/bench_kernels.py.
"""

import os

from . import _pure

if os.environ.get("SEMREL_KERNELS", "").strip().lower() == "pure":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

fft2 = _impl.fft2
gaussian_blur_replicate = _impl.gaussian_blur_replicate
resize_bilinear = _impl.resize_bilinear


def backend() -> str:
    """Name of the active kernel lane: "compiled" or "pure"."""
    return BACKEND
