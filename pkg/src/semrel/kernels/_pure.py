"""Pure-numpy implementations of the hot kernels.

Fallback lane used when the compiled extension is unavailable. Contracts
match semrel.kernels._core exactly; parity is asserted in the test suite.
"""

import numpy as np


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.intp)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _fft_last_axis(a: np.ndarray, sign: float) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey along the last axis (length power of two)."""
    n = a.shape[-1]
    if n == 1:
        return a.copy()
    a = a[..., _bit_reverse_indices(n)]
    span = 1
    while span < n:
        m = 2 * span
        w = np.exp(sign * 1j * np.pi * np.arange(span) / span)
        g = a.reshape(a.shape[:-1] + (n // m, m))
        even = g[..., :span]
        odd = g[..., span:] * w
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(a.shape)
        span = m
    return a


def fft2(data, inverse: bool = False) -> np.ndarray:
    """Unnormalized forward 2-D DFT; inverse applies 1/(W*H) scaling.

    Both dimensions must be powers of two (enforced by the caller).
    """
    a = np.array(data, dtype=np.complex128)
    sign = 1.0 if inverse else -1.0
    a = _fft_last_axis(a, sign)
    a = _fft_last_axis(a.T, sign).T
    if inverse:
        a = a / (a.shape[0] * a.shape[1])
    return a


def gaussian_blur_replicate(img, kernel) -> np.ndarray:
    """Separable correlation with a symmetric 1-D kernel, replicate-edge padding.

    Horizontal pass first, then vertical; each pass pads by the kernel radius
    with the nearest edge value.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    r = (kernel.shape[0] - 1) // 2
    h, w = img.shape

    padded = np.pad(img, ((0, 0), (r, r)), mode="edge")
    out = np.zeros_like(img)
    for k in range(kernel.shape[0]):
        out += kernel[k] * padded[:, k:k + w]

    padded = np.pad(out, ((r, r), (0, 0)), mode="edge")
    out2 = np.zeros_like(img)
    for k in range(kernel.shape[0]):
        out2 += kernel[k] * padded[k:k + h, :]
    return out2


def resize_bilinear(img, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample with pixel-center alignment.

    Output pixel j maps to source coordinate (j + 0.5) * in/out - 0.5,
    clamped to the valid range, so constant images stay constant and values
    never leave [min(img), max(img)].
    """
    img = np.asarray(img, dtype=np.float64)
    in_h, in_w = img.shape
    if out_h == in_h and out_w == in_w:
        return img.copy()
    ys = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0.0, in_h - 1.0)
    xs = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = img[np.ix_(y0, x0)] * (1.0 - wx) + img[np.ix_(y0, x1)] * wx
    bot = img[np.ix_(y1, x0)] * (1.0 - wx) + img[np.ix_(y1, x1)] * wx
    return top * (1.0 - wy) + bot * wy
