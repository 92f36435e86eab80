import numpy as np
import pytest
from PIL import Image, ImageDraw

# quadrant fills bright enough that their mean luminance clears 0.7, on a
# background dim enough that untouched quadrants stay well below it
_PALETTE = [(238, 222, 200), (214, 238, 206), (208, 218, 242), (242, 212, 228)]


def paint_scene(path, bright_quadrants, size=(96, 64), base=40):
    w, h = size
    img = Image.new("RGB", size, (base, base, base))
    draw = ImageDraw.Draw(img)
    quads = {
        0: (0, 0, w // 2 - 1, h // 2 - 1),
        1: (w // 2, 0, w - 1, h // 2 - 1),
        2: (0, h // 2, w // 2 - 1, h - 1),
        3: (w // 2, h // 2, w - 1, h - 1),
    }
    for q in bright_quadrants:
        draw.rectangle(quads[q], fill=_PALETTE[q])
    img.save(path)
    return path


@pytest.fixture
def scene_png(tmp_path):
    return paint_scene(tmp_path / "scene.png", bright_quadrants=(0, 3))


def rgb_array(bright_quadrants, size=(96, 64), base=40):
    w, h = size
    arr = np.full((h, w, 3), base, dtype=np.uint8)
    fills = {q: _PALETTE[q] for q in bright_quadrants}
    for q, color in fills.items():
        r0 = 0 if q in (0, 1) else h // 2
        c0 = 0 if q in (0, 2) else w // 2
        arr[r0:r0 + h // 2, c0:c0 + w // 2] = color
    return arr
