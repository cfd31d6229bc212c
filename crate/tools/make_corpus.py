"""Regenerate the committed natural-image corpus (8-bit planar 4:2:0).

Source images ship with scikit-image (skimage.data) and are public domain or
CC0. Each image is box-downscaled by 2 and a 128x64 window is cropped.
"""
import os

import numpy as np
from skimage import data

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "corpus")
W, H = 128, 64

# (name, loader, crop origin in the downscaled image)
SOURCES = [
    ("chelsea", data.chelsea, (40, 40)),
    ("coffee", data.coffee, (60, 90)),
    ("astronaut", data.astronaut, (64, 20)),
    ("camera", data.camera, (60, 40)),
    ("rocket", data.rocket, (100, 40)),
    ("coins", data.coins, (30, 40)),
    ("moon", data.moon, (64, 96)),
    ("ihc", data.immunohistochemistry, (64, 64)),
    ("brick", data.brick, (64, 64)),
    ("clock", data.clock, (36, 40)),
]


def to_ycbcr(rgb):
    rgb = rgb.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 16 + (65.481 * r + 128.553 * g + 24.966 * b) / 255
    cb = 128 + (-37.797 * r - 74.203 * g + 112.0 * b) / 255
    cr = 128 + (112.0 * r - 93.786 * g - 18.214 * b) / 255
    return y, cb, cr


def down2(p):
    h, w = p.shape[0] // 2 * 2, p.shape[1] // 2 * 2
    p = p[:h, :w]
    return (p[0::2, 0::2] + p[1::2, 0::2] + p[0::2, 1::2] + p[1::2, 1::2]) / 4


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, load, (ox, oy) in SOURCES:
        img = load()
        if img.ndim == 2:
            y = img.astype(np.float64)
            cb = np.full_like(y, 128.0)
            cr = np.full_like(y, 128.0)
        else:
            y, cb, cr = to_ycbcr(img[..., :3])
        y, cb, cr = (down2(p) for p in (y, cb, cr))
        y = y[oy:oy + H, ox:ox + W]
        cb = down2(cb[oy:oy + H, ox:ox + W])
        cr = down2(cr[oy:oy + H, ox:ox + W])
        assert y.shape == (H, W)
        planes = [np.clip(np.rint(p), 0, 255).astype(np.uint8) for p in (y, cb, cr)]
        with open(os.path.join(OUT, f"{name}_{W}x{H}.yuv"), "wb") as f:
            for p in planes:
                f.write(p.tobytes())


if __name__ == "__main__":
    main()
