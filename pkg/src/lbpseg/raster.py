"""Raster primitives: luminance, Gaussian smoothing, range rescaling and image I/O.

Images are plain numpy arrays:

* RGB images are ``uint8`` arrays of shape ``(H, W, 3)``.
* Scalar maps are ``float64`` arrays of shape ``(H, W)``.
* Binary masks are ``bool`` arrays of shape ``(H, W)``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import ChannelMismatchError, ParameterError, SizeError

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.2989, 0.5870, 0.1140)


def check_rgb(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ChannelMismatchError(f"expected an (H, W, 3) image, got shape {img.shape}")
    if img.shape[0] == 0 or img.shape[1] == 0:
        raise SizeError("image has zero width or height")
    return img


def check_scalar_map(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise SizeError(f"expected a 2-D map, got shape {m.shape}")
    if m.size == 0:
        raise SizeError("map has zero width or height")
    if not np.all(np.isfinite(m)):
        raise ParameterError("map contains NaN or infinite samples")
    return m


def to_luminance(img: np.ndarray) -> np.ndarray:
    """Weighted sum of R, G, B kept as float64 (no rounding)."""
    img = check_rgb(img)
    r, g, b = LUMA_WEIGHTS
    rgb = img.astype(np.float64)
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalised 1-D Gaussian taps truncated at radius ceil(3 * sigma)."""
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return np.ones(1)
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(m: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with replicate ("nearest") border padding.

    ``sigma == 0`` returns an unchanged copy.
    """
    m = check_scalar_map(m)
    k = gaussian_kernel(sigma)
    if k.size == 1:
        return m.copy()
    # kernel is symmetric, so correlation == convolution
    out = ndimage.correlate1d(m, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def rescale_minmax(m: np.ndarray) -> np.ndarray:
    """Affine stretch of ``[min, max]`` onto ``[0, 255]``; a flat map becomes all zeros."""
    m = check_scalar_map(m)
    lo = m.min()
    hi = m.max()
    if hi == lo:
        return np.zeros_like(m)
    out = (m - lo) * (255.0 / (hi - lo))
    # guard against 255.00000000000003 from rounding
    return np.clip(out, 0.0, 255.0)


def load_rgb(path: str | Path) -> np.ndarray:
    """Read a PNG/BMP (or anything Pillow opens) as an ``(H, W, 3)`` uint8 array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def load_mask(path: str | Path) -> np.ndarray:
    """Read a ground-truth mask; any sample above 127 counts as lesion."""
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA", "P"):
            im = im.convert("L")
        arr = np.asarray(im)
    if arr.dtype == bool:
        return arr.copy()
    if arr.ndim == 3:
        arr = arr[..., 0]
    return arr > 127 if arr.max() > 1 else arr > 0


def image_size(path: str | Path) -> tuple[int, int]:
    """(width, height) read from the file header only."""
    with Image.open(path) as im:
        return im.size


def save_mask_png(mask: np.ndarray, path: str | Path) -> None:
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(path)


def save_scalar_png(m: np.ndarray, path: str | Path) -> None:
    """Write a diagnostic map as 8-bit grayscale after min-max rescaling."""
    img = np.rint(rescale_minmax(m)).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path)


def save_rgb_png(img: np.ndarray, path: str | Path) -> None:
    Image.fromarray(check_rgb(img).astype(np.uint8), mode="RGB").save(path)
