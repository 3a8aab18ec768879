"""Cleanup of the raw cluster mask.

Foreground is 8-connected and background 4-connected throughout.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import EmptyMaskError

FOREGROUND_STRUCTURE = np.ones((3, 3), dtype=bool)
BACKGROUND_STRUCTURE = ndimage.generate_binary_structure(2, 1)


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Set every background region that cannot reach the image border to foreground."""
    mask = np.asarray(mask, dtype=bool)
    return ndimage.binary_fill_holes(mask, structure=BACKGROUND_STRUCTURE)


def keep_principal_component(mask: np.ndarray) -> np.ndarray:
    """Keep only the largest 8-connected foreground component.

    Equal sizes resolve to the component whose first pixel comes first in
    row-major order.
    """
    mask = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(mask, structure=FOREGROUND_STRUCTURE)
    if n == 0:
        raise EmptyMaskError("mask has no foreground pixels")
    # ndimage.label numbers components in raster order of their first pixel,
    # so argmax's first-hit rule is the row-major tie-break
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    sizes[0] = 0
    return labels == int(np.argmax(sizes))


def clean_mask(mask: np.ndarray) -> np.ndarray:
    return fill_holes(keep_principal_component(mask))
