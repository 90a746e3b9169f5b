"""Regenerates the bundled 64x64 grayscale test patches from scikit-image sample data.

Usage: python3 generate.py [outdir]
"""
import pathlib
import sys

import numpy as np
import skimage.color
import skimage.data
from skimage.util import img_as_float

SIZE = 64
# (sample image, top-left y, top-left x)
CROPS = [
    ("astronaut", 40, 168), ("astronaut", 344, 184),
    ("camera", 408, 408), ("camera", 312, 296),
    ("chelsea", 120, 136), ("chelsea", 40, 120),
    ("coffee", 200, 328), ("coffee", 312, 8),
    ("rocket", 296, 24), ("rocket", 344, 264),
    ("brick", 328, 360),
    ("grass", 392, 328),
    ("gravel", 232, 120),
    ("coins", 168, 200), ("coins", 88, 232),
    ("moon", 136, 264),
    ("clock", 72, 184), ("clock", 168, 216),
    ("immunohistochemistry", 328, 296),
    ("text", 40, 8),
]


def gray(name):
    img = img_as_float(getattr(skimage.data, name)())
    if img.ndim == 3:
        img = skimage.color.rgb2gray(img[..., :3])
    return img


def write_pgm16(path, img):
    data = np.clip(np.round(img * 65535), 0, 65535).astype(">u2")
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n65535\n" % (img.shape[1], img.shape[0]))
        f.write(data.tobytes())


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parent)
    for i, (name, y, x) in enumerate(CROPS):
        write_pgm16(out / f"patch_{i:02d}_{name}.pgm", gray(name)[y:y + SIZE, x:x + SIZE])


if __name__ == "__main__":
    main()
