"""Two-dimensional feature space fed to the clusterer.

Two variants:

``ab``
    Both maps are stretched to [0, 255], each pixel is read as the RGB colour
    (L, Y, L) and taken to CIE 1976 a*b* (sRGB primaries, D65, 2 deg observer).
    Flat bright skin lands near green; textured dark lesion near magenta.
``zn``
    Y and L are each standardised to zero mean and unit (population) variance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateVarianceError, ParameterError, RangeError, SizeError
from .raster import check_scalar_map, rescale_minmax

VARIANTS = ("ab", "zn")

# linear sRGB -> XYZ (IEC 61966-2-1)
SRGB_TO_XYZ = np.array(
    [
        [0.4124, 0.3576, 0.1805],
        [0.2126, 0.7152, 0.0722],
        [0.0193, 0.1192, 0.9505],
    ]
)
D65_WHITE = np.array([0.95047, 1.0, 1.08883])

_DELTA = 6.0 / 29.0


def znormalize(m: np.ndarray) -> np.ndarray:
    """``(v - mean) / std`` using the population standard deviation."""
    m = check_scalar_map(m)
    mu = m.mean()
    sigma = m.std()
    if sigma == 0.0:
        raise DegenerateVarianceError("map is constant; cannot normalise to unit variance")
    return (m - mu) / sigma


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)


def rgb255_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Float RGB on a [0, 255] scale, shape (..., 3) -> L*a*b*, shape (..., 3)."""
    lin = srgb_to_linear(np.asarray(rgb, dtype=np.float64) / 255.0)
    xyz = lin @ SRGB_TO_XYZ.T
    fx, fy, fz = (_lab_f(xyz[..., i] / D65_WHITE[i]) for i in range(3))
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def yl_to_ab(y: np.ndarray, l: np.ndarray) -> np.ndarray:
    """Map each pixel to the a*b* coordinates of RGB colour (L, Y, L).

    Returns an ``(H, W, 2)`` array of (a*, b*). L* is dropped.
    """
    y = check_scalar_map(y)
    l = check_scalar_map(l)
    if y.shape != l.shape:
        raise SizeError(f"Y {y.shape} and L {l.shape} differ in shape")
    for name, m in (("Y", y), ("L", l)):
        if m.min() < 0.0 or m.max() > 255.0:
            raise RangeError(f"{name} samples must lie in [0, 255], got [{m.min()}, {m.max()}]")

    # (L, Y, L): the two L channels share one linearisation
    ly = srgb_to_linear(np.stack([l, y], axis=-1) / 255.0)
    lin_l = ly[..., 0]
    lin_y = ly[..., 1]
    m = SRGB_TO_XYZ
    fx = _lab_f(((m[0, 0] + m[0, 2]) * lin_l + m[0, 1] * lin_y) / D65_WHITE[0])
    fy = _lab_f(((m[1, 0] + m[1, 2]) * lin_l + m[1, 1] * lin_y) / D65_WHITE[1])
    fz = _lab_f(((m[2, 0] + m[2, 2]) * lin_l + m[2, 1] * lin_y) / D65_WHITE[2])
    return np.stack([500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


@dataclass(frozen=True)
class FeatureCloud:
    """One 2-D point per pixel, in row-major pixel order."""

    points: np.ndarray
    shape: tuple[int, int]

    def pixel_coords(self, index: np.ndarray | int) -> tuple[np.ndarray, np.ndarray]:
        """Point index -> (row, col)."""
        return np.unravel_index(index, self.shape)

    def point_index(self, row, col):
        return np.ravel_multi_index((row, col), self.shape)

    def to_grid(self, values: np.ndarray) -> np.ndarray:
        """Reshape a per-point array back onto the pixel grid."""
        return np.asarray(values).reshape(self.shape)


def build_features(y: np.ndarray, l_smooth: np.ndarray, variant: str = "ab") -> FeatureCloud:
    y = check_scalar_map(y)
    l_smooth = check_scalar_map(l_smooth)
    if y.shape != l_smooth.shape:
        raise SizeError(f"Y {y.shape} and L {l_smooth.shape} differ in shape")
    if variant == "ab":
        grid = yl_to_ab(rescale_minmax(y), rescale_minmax(l_smooth))
    elif variant == "zn":
        grid = np.stack([znormalize(y), znormalize(l_smooth)], axis=-1)
    else:
        raise ParameterError(f"unknown feature variant {variant!r}; expected one of {VARIANTS}")
    return FeatureCloud(points=grid.reshape(-1, 2), shape=y.shape)


def write_feature_csv(cloud: FeatureCloud, path: str | Path) -> None:
    """Dump the cloud as pixel_x, pixel_y, a, b (column, row, then the two features)."""
    rows, cols = cloud.pixel_coords(np.arange(cloud.points.shape[0]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pixel_x", "pixel_y", "a", "b"])
        for c, r, (a, b) in zip(cols.tolist(), rows.tolist(), cloud.points.tolist()):
            writer.writerow([c, r, f"{a:.6f}", f"{b:.6f}"])
