"""Portable-map (P2/P3/P5/P6) reading and P5/CSV writing.

Only 8-bit maps are supported. Color maps are reduced to grayscale with
Rec.601 luma (0.299 R + 0.587 G + 0.114 B).
"""

import numpy as np

from .errors import IoError, MalformedHeader, UnsupportedFormat

_WHITESPACE = b" \t\r\n\x0b\x0c"


def _skip_space_and_comments(data: bytes, pos: int) -> int:
    while pos < len(data):
        c = data[pos:pos + 1]
        if c in (b"#",):
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _next_token(data: bytes, pos: int):
    pos = _skip_space_and_comments(data, pos)
    if pos >= len(data):
        raise MalformedHeader(f"unexpected end of file at byte {pos}")
    end = pos
    while end < len(data) and data[end:end + 1] not in _WHITESPACE and data[end:end + 1] != b"#":
        end += 1
    return data[pos:end], end


def _next_int(data: bytes, pos: int, what: str):
    pos = _skip_space_and_comments(data, pos)
    tok, end = _next_token(data, pos)
    try:
        return int(tok), end
    except ValueError:
        raise MalformedHeader(f"expected integer {what} at byte {pos}, got {tok!r}") from None


def read_pnm(path):
    """Read a P2/P3/P5/P6 file into a float64 (H, W) grid in [0, 1]."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None

    pos = _skip_space_and_comments(data, 0)
    magic = data[pos:pos + 2]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise UnsupportedFormat(f"unsupported magic {magic!r} (want P2/P3/P5/P6)")
    pos += 2

    width, pos = _next_int(data, pos, "width")
    height, pos = _next_int(data, pos, "height")
    maxval, pos = _next_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise MalformedHeader(f"bad dimensions {width}x{height} at byte {pos}")
    if maxval < 1:
        raise MalformedHeader(f"bad maxval {maxval} at byte {pos}")
    if maxval > 255:
        raise UnsupportedFormat(f"maxval {maxval} exceeds 8-bit range")

    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels

    if magic in (b"P5", b"P6"):
        # exactly one whitespace byte separates maxval from the raster
        if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
            raise MalformedHeader(f"missing raster separator at byte {pos}")
        pos += 1
        raster = data[pos:pos + count]
        if len(raster) < count:
            raise MalformedHeader(
                f"raster truncated at byte {pos + len(raster)} (need {count} bytes)")
        values = np.frombuffer(raster, dtype=np.uint8).astype(np.float64)
    else:
        values = np.empty(count, dtype=np.float64)
        for i in range(count):
            v, pos = _next_int(data, pos, "sample")
            values[i] = v
        v_bad = values.max(initial=0)
        if v_bad > maxval or values.min(initial=0) < 0:
            raise MalformedHeader(f"sample out of range 0..{maxval}")

    values /= float(maxval)
    if channels == 3:
        rgb = values.reshape(height, width, 3)
        gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
        return gray
    return values.reshape(height, width)


def write_p5(grid, path):
    """Write a [0, 1] grid as an 8-bit P5 file (values rounded half-up)."""
    arr = np.asarray(grid, dtype=np.float64)
    h, w = arr.shape
    scaled = np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    try:
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(scaled.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def write_csv(grid, path):
    """Write a grid as row-major CSV at full double precision."""
    arr = np.asarray(grid, dtype=np.float64)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for row in arr:
                fh.write(",".join(format(v, ".17g") for v in row))
                fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None
