"""Spectral-residual saliency maps and per-object saliency scores.

The pipeline works at a small power-of-two resolution: the grayscale image
is downsampled, its log amplitude spectrum is smoothed with a Gaussian, the
residual (log amplitude minus smoothed log amplitude) is recombined with the
original phase, and the squared magnitude of the inverse transform gives the
raw map, which is min-max normalized and resampled back to the input size.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, pnm
from .errors import NonPowerOfTwo
from .geometry import BBox

WORK_SIZES = (32, 64, 128, 256)
NORMALIZE_EPS = 1e-12


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) float64 in [0, 1]


@dataclass(frozen=True)
class SaliencyMap:
    width: int
    height: int
    values: np.ndarray  # (height, width) float64 in [0, 1]


@dataclass(frozen=True)
class SRParams:
    """Spectral-residual parameters.

    work_size is the square FFT resolution; gaussian_sigma smooths the log
    amplitude spectrum with a kernel of radius ceil(3*sigma) and replicate
    padding; log_epsilon guards ln(0) for exactly-zero amplitude bins.
    """
    work_size: int = 64
    gaussian_sigma: float = 2.0
    log_epsilon: float = 1e-8

    def __post_init__(self):
        if self.work_size not in WORK_SIZES:
            raise ValueError(f"work_size must be one of {WORK_SIZES}, got {self.work_size}")
        if not self.gaussian_sigma > 0.0:
            raise ValueError("gaussian_sigma must be positive")
        if not self.log_epsilon > 0.0:
            raise ValueError("log_epsilon must be positive")

    @property
    def kernel_radius(self) -> int:
        return math.ceil(3.0 * self.gaussian_sigma)


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    """Symmetric 1-D Gaussian kernel of length 2*radius + 1, normalized to sum 1."""
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


def _check_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def fft2(grid, inverse: bool = False) -> np.ndarray:
    """2-D DFT of a complex grid; forward unnormalized, inverse scaled by 1/(W*H).

    Both dimensions must be powers of two.
    """
    arr = np.asarray(grid)
    if arr.ndim != 2 or not (_check_pow2(arr.shape[0]) and _check_pow2(arr.shape[1])):
        raise NonPowerOfTwo(f"fft2 needs power-of-two dimensions, got {arr.shape}")
    return kernels.fft2(arr, inverse=inverse)


def resize_bilinear(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Bilinear resample with pixel-center alignment."""
    return GrayImage(out_w, out_h, kernels.resize_bilinear(img.pixels, out_h, out_w))


def load_gray(path) -> GrayImage:
    """Load a P2/P3/P5/P6 file as a grayscale image in [0, 1]."""
    grid = pnm.read_pnm(path)
    return GrayImage(grid.shape[1], grid.shape[0], grid)


def _normalize01(grid: np.ndarray) -> np.ndarray:
    lo = grid.min()
    hi = grid.max()
    if hi - lo < NORMALIZE_EPS:
        return np.zeros_like(grid)
    return (grid - lo) / (hi - lo)


def spectral_residual(img: GrayImage, params: SRParams = SRParams()) -> SaliencyMap:
    """Spectral-residual saliency map at the input image's resolution.

    The map is renormalized after the final resample so that min is exactly 0
    and max exactly 1 whenever the map is not degenerate (a no-op when the
    input is already at work size).

    A constant working image is degenerate by definition and maps to all
    zeros.  The epsilon inside the log assigns unit magnitude to empty
    frequency bins, so without this branch a structureless image would
    come back as a spurious impulse at the origin rather than a flat map.
    """
    work = kernels.resize_bilinear(img.pixels, params.work_size, params.work_size)
    if float(work.max() - work.min()) < NORMALIZE_EPS:
        return SaliencyMap(img.width, img.height,
                           np.zeros((img.height, img.width)))
    spectrum = kernels.fft2(work.astype(np.complex128))
    amplitude = np.abs(spectrum)
    phase = np.angle(spectrum)
    log_amp = np.log(amplitude + params.log_epsilon)
    kernel = gaussian_kernel(params.gaussian_sigma, params.kernel_radius)
    smoothed = kernels.gaussian_blur_replicate(log_amp, kernel)
    residual = log_amp - smoothed
    recombined = np.exp(residual) * np.exp(1j * phase)
    raw = np.abs(kernels.fft2(recombined, inverse=True)) ** 2
    values = _normalize01(raw)
    if img.height != params.work_size or img.width != params.work_size:
        values = _normalize01(kernels.resize_bilinear(values, img.height, img.width))
    return SaliencyMap(img.width, img.height, values)


def object_saliency(smap: SaliencyMap, b: BBox, reduce: str = "mean"):
    """Reduce map values at pixel centers inside the (clipped) box.

    Pixel (i, j) has center (j + 0.5, i + 0.5); the center is inside when it
    falls in [x, x+w) x [y, y+h). Returns None when no pixel center is
    covered. reduce is one of mean (default), max, sum.
    """
    if reduce not in ("mean", "max", "sum"):
        raise ValueError(f"unknown reduce {reduce!r}")
    j0 = max(math.ceil(b.x - 0.5), 0)
    j1 = min(math.ceil(b.x + b.w - 0.5), smap.width)
    i0 = max(math.ceil(b.y - 0.5), 0)
    i1 = min(math.ceil(b.y + b.h - 0.5), smap.height)
    if j0 >= j1 or i0 >= i1:
        return None
    patch = smap.values[i0:i1, j0:j1]
    if reduce == "max":
        return float(patch.max())
    if reduce == "sum":
        return float(patch.sum())
    return float(patch.mean())


def save_map_p5(smap: SaliencyMap, path) -> None:
    pnm.write_p5(smap.values, path)


def save_map_csv(smap: SaliencyMap, path) -> None:
    pnm.write_csv(smap.values, path)
