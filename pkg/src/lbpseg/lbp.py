"""3x3 local binary patterns, rotation-invariant classes and the flatness map.

Neighbour ``p`` contributes bit ``2**p``; ``p = 0`` is east and the order
proceeds counter-clockwise: E, NE, N, NW, W, SW, S, SE. A neighbour sets its
bit only when strictly greater than the centre, so flat patches give code 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateReferenceError, ParameterError, SizeError
from .raster import check_scalar_map

# (row offset, column offset) for p = 0..7; rows grow downwards
NEIGHBOR_OFFSETS = (
    (0, 1),    # E
    (-1, 1),   # NE
    (-1, 0),   # N
    (-1, -1),  # NW
    (0, -1),   # W
    (1, -1),   # SW
    (1, 0),    # S
    (1, 1),    # SE
)

FLAT_CLASSES = (0, 1)


def _rotations(code: int) -> list[int]:
    return [((code >> k) | (code << (8 - k))) & 0xFF for k in range(8)]


def _check_code(code: int) -> int:
    code = int(code)
    if not 0 <= code <= 255:
        raise ParameterError(f"LBP code must be in [0, 255], got {code}")
    return code


def lbp_code(center: float, neighbors: Sequence[float]) -> int:
    """LBP code of a single pixel given its 8 neighbours in E, NE, N, ... SE order."""
    if len(neighbors) != 8:
        raise ParameterError(f"expected 8 neighbours, got {len(neighbors)}")
    code = 0
    for p, v in enumerate(neighbors):
        if v - center > 0:
            code |= 1 << p
    return code


def ri_class(code: int) -> int:
    """Smallest value among the 8 circular rotations of ``code``."""
    return min(_rotations(_check_code(code)))


def transition_count(code: int) -> int:
    """Number of circular 0/1 transitions in the 8-bit pattern."""
    code = _check_code(code)
    rotated = ((code >> 1) | (code << 7)) & 0xFF
    return bin(code ^ rotated).count("1")


def is_uniform(code: int) -> bool:
    return transition_count(code) <= 2


RI_TABLE = np.array([ri_class(c) for c in range(256)], dtype=np.uint8)
FLAT_TABLE = np.isin(RI_TABLE, FLAT_CLASSES)


@dataclass(frozen=True)
class LbpMap:
    codes: np.ndarray
    class_ids: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes.shape


def lbp_codes(y: np.ndarray) -> np.ndarray:
    """Per-pixel LBP codes (uint8) with replicate padding, same shape as ``y``."""
    y = check_scalar_map(y)
    h, w = y.shape
    if h < 3 or w < 3:
        raise SizeError(f"LBP needs at least a 3x3 image, got {h}x{w}")
    padded = np.pad(y, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.uint8)
    for p, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        neighbor = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        codes |= ((neighbor - y) > 0).astype(np.uint8) << p
    return codes


def lbp_map(y: np.ndarray) -> LbpMap:
    codes = lbp_codes(y)
    return LbpMap(codes=codes, class_ids=RI_TABLE[codes])


def flatness_map(lbp: LbpMap | np.ndarray) -> np.ndarray:
    """Binary L map: False where the class is 0 or 1 (flat texture), True elsewhere."""
    codes = lbp.codes if isinstance(lbp, LbpMap) else np.asarray(lbp, dtype=np.uint8)
    return ~FLAT_TABLE[codes]


@dataclass(frozen=True)
class ClassPresence:
    class_id: int
    frac_inside: float
    frac_outside: float
    signed_distance: float


def presence_analysis(lbp: LbpMap, gt: np.ndarray) -> list[ClassPresence]:
    """Per-class presence inside/outside the lesion, relative to the area-ratio line.

    Both fractions are taken over the whole image. The reference line passes
    through the origin with slope ``area(skin) / area(lesion)``; a class spread
    in proportion to area sits on it. Positive distance means the class sits
    above the line, i.e. is skin-dominant.
    """
    gt = np.asarray(gt, dtype=bool)
    if gt.shape != lbp.shape:
        raise SizeError(f"GT shape {gt.shape} does not match LBP map {lbp.shape}")
    total = gt.size
    lesion_area = int(gt.sum())
    skin_area = total - lesion_area
    if lesion_area == 0 or skin_area == 0:
        raise DegenerateReferenceError("GT covers none or all of the image; the reference slope is undefined")
    slope = skin_area / lesion_area
    norm = math.hypot(1.0, slope)

    ids = lbp.class_ids.ravel().astype(np.intp)
    inside = np.bincount(ids[gt.ravel()], minlength=256)
    outside = np.bincount(ids[~gt.ravel()], minlength=256)
    rows = []
    for cid in np.flatnonzero(inside + outside):
        x = inside[cid] / total
        y = outside[cid] / total
        rows.append(ClassPresence(int(cid), float(x), float(y), float((y - slope * x) / norm)))
    return rows


def write_presence_csv(rows: Sequence[ClassPresence], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class_id", "frac_inside", "frac_outside", "signed_distance"])
        for r in rows:
            writer.writerow([r.class_id, f"{r.frac_inside:.9f}", f"{r.frac_outside:.9f}", f"{r.signed_distance:.9f}"])
