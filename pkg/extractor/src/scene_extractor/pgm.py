"""Grayscale P5 export for extracted scenes.

The downstream bundle consumer reads binary graymaps with a `P5`, width,
height, maxval 255 header; color is folded to Rec. 601 luma and samples
round half-up, matching that reader's own writer byte for byte.
"""

import numpy as np


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """HxWx3 uint8 to HxW luma in [0, 1]."""
    arr = np.asarray(rgb, dtype=np.float64) / 255.0
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected HxWx3 rgb array, got shape {arr.shape}")
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]


def write_grayscale_p5(gray: np.ndarray, path) -> None:
    """Write a [0, 1] grid as an 8-bit binary graymap."""
    arr = np.asarray(gray, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grid, got shape {arr.shape}")
    h, w = arr.shape
    scaled = np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(scaled.tobytes())
