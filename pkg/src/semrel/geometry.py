"""Bounding-box algebra: adjacency, image proportion, 3x3 position grid."""

from dataclasses import dataclass

from .errors import DegenerateBox

POSITION_LABELS = (
    ("top-left", "top-center", "top-right"),
    ("center-left", "center", "center-right"),
    ("bottom-left", "bottom-center", "bottom-right"),
)

ALL_POSITIONS = tuple(label for row in POSITION_LABELS for label in row)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: (x, y) is the top-left corner, w/h in pixels."""
    x: float
    y: float
    w: float
    h: float

    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class ImageDims:
    width: int
    height: int


def clip_to_image(b: BBox, dims: ImageDims) -> BBox:
    """Clip a box to [0, width] x [0, height].

    Detectors can emit boxes exceeding the image bounds; clipping keeps
    downstream area-based quantities honest. Raises DegenerateBox when the
    clipped area is zero.
    """
    x0 = max(b.x, 0.0)
    y0 = max(b.y, 0.0)
    x1 = min(b.x + b.w, float(dims.width))
    y1 = min(b.y + b.h, float(dims.height))
    if x1 - x0 <= 0.0 or y1 - y0 <= 0.0:
        raise DegenerateBox(
            f"box ({b.x},{b.y},{b.w},{b.h}) has no area inside {dims.width}x{dims.height}")
    return BBox(x0, y0, x1 - x0, y1 - y0)


def intersection_area(a: BBox, b: BBox) -> float:
    """Area of the axis-aligned intersection; 0 when disjoint or edge-touching."""
    w = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    h = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def is_adjacent(a: BBox, b: BBox) -> bool:
    """True iff the boxes overlap with strictly positive area.

    Edge contact does not count: overlap means shared interior.
    """
    return intersection_area(a, b) > 0.0


def proportion(b: BBox, dims: ImageDims) -> float:
    """Fraction of the image covered by the (already clipped) box."""
    if b.w <= 0.0 or b.h <= 0.0:
        raise DegenerateBox(f"box ({b.x},{b.y},{b.w},{b.h}) has nonpositive extent")
    return (b.w * b.h) / (dims.width * dims.height)


def position(b: BBox, dims: ImageDims) -> str:
    """Map the box center onto a uniform 3x3 grid of position labels.

    Boundary centers go to the higher-index cell (plain floor rule), so the
    nine preimages partition the image.
    """
    cx = b.x + b.w / 2.0
    cy = b.y + b.h / 2.0
    col = min(int(3.0 * cx / dims.width), 2)
    row = min(int(3.0 * cy / dims.height), 2)
    return POSITION_LABELS[row][col]
