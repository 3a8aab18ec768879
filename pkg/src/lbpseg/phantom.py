"""Synthetic lesion images with known ground truth."""

from __future__ import annotations

import numpy as np


def disk_mask(shape: tuple[int, int], radius: float, center: tuple[float, float] | None = None) -> np.ndarray:
    h, w = shape
    cy, cx = center if center is not None else ((h - 1) / 2.0, (w - 1) / 2.0)
    rr, cc = np.mgrid[0:h, 0:w]
    return (rr - cy) ** 2 + (cc - cx) ** 2 <= radius**2


def ragged_disk_mask(
    shape: tuple[int, int],
    radius: float,
    amplitude: float,
    lobes: int = 9,
    center: tuple[float, float] | None = None,
) -> np.ndarray:
    """Disk whose radius oscillates as ``radius + amplitude * sin(lobes * theta)``."""
    h, w = shape
    cy, cx = center if center is not None else ((h - 1) / 2.0, (w - 1) / 2.0)
    rr, cc = np.mgrid[0:h, 0:w]
    theta = np.arctan2(rr - cy, cc - cx)
    return np.hypot(rr - cy, cc - cx) <= radius + amplitude * np.sin(lobes * theta)


def lesion_phantom(
    mask: np.ndarray,
    seed: int = 0,
    background: int = 200,
    noise_range: tuple[int, int] = (40, 120),
) -> np.ndarray:
    """Gray RGB image: flat ``background`` outside ``mask``, i.i.d. uniform integer noise inside."""
    rng = np.random.default_rng(seed)
    lo, hi = noise_range
    gray = np.full(mask.shape, background, dtype=np.uint8)
    gray[mask] = rng.integers(lo, hi + 1, size=int(mask.sum()), dtype=np.uint8)
    return np.repeat(gray[..., None], 3, axis=2)


def disk_phantom(size: int = 256, radius: float = 64, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """The standard test scene: returns (rgb image, ground-truth disk)."""
    gt = disk_mask((size, size), radius)
    return lesion_phantom(gt, seed=seed), gt


def dermoscopy_like(shape: tuple[int, int] = (572, 765), seed: int = 0) -> np.ndarray:
    """Coloured, full-size stand-in for a dermoscopic image (for timing)."""
    rng = np.random.default_rng(seed)
    h, w = shape
    lesion = ragged_disk_mask(shape, radius=min(h, w) * 0.3, amplitude=12.0)
    skin = np.array([215.0, 170.0, 150.0])
    dark = np.array([110.0, 70.0, 55.0])
    img = np.empty((h, w, 3))
    img[:] = skin + rng.normal(0.0, 1.5, size=(h, w, 1))
    img[lesion] = dark + rng.uniform(-35.0, 35.0, size=(int(lesion.sum()), 1))
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)
