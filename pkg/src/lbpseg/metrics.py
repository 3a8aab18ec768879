"""Segmentation quality metrics and dataset statistics.

Pixel metrics are percentages. ``g_perp`` is the mean luminance gradient
across the mask contour, measured along the contour normal.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DegenerateGTError,
    DegenerateMaskError,
    InsufficientDataError,
    SizeError,
    UndefinedCVError,
)
from .raster import check_scalar_map, gaussian_smooth

log = logging.getLogger(__name__)

LESION_CLASSES = ("AN", "CN", "M")
METRICS = ("be", "tdr", "fpr", "g_perp")


def _pair(sm, gt) -> tuple[np.ndarray, np.ndarray]:
    sm = np.asarray(sm, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if sm.shape != gt.shape:
        raise SizeError(f"segmentation {sm.shape} and ground truth {gt.shape} differ in shape")
    return sm, gt


def _lesion_area(gt: np.ndarray) -> int:
    area = int(gt.sum())
    if area == 0:
        raise DegenerateGTError("ground truth has no lesion pixels")
    return area


def border_error(sm: np.ndarray, gt: np.ndarray) -> float:
    """XOR area over GT area, in percent. Can exceed 100."""
    sm, gt = _pair(sm, gt)
    area = _lesion_area(gt)
    return 100.0 * int(np.logical_xor(sm, gt).sum()) / area


def tdr(sm: np.ndarray, gt: np.ndarray) -> float:
    """Share of lesion pixels detected, in percent."""
    sm, gt = _pair(sm, gt)
    area = _lesion_area(gt)
    return 100.0 * int((sm & gt).sum()) / area


def fpr(sm: np.ndarray, gt: np.ndarray) -> float:
    """Share of skin pixels wrongly marked as lesion, in percent."""
    sm, gt = _pair(sm, gt)
    skin = int((~gt).sum())
    if skin == 0:
        raise DegenerateGTError("ground truth covers the whole image; no skin pixels")
    return 100.0 * int((sm & ~gt).sum()) / skin


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """Foreground pixels with at least one 4-neighbour (inside the image) in background."""
    mask = np.asarray(mask, dtype=bool)
    # pad with foreground so the image frame is not treated as background
    bg = ~np.pad(mask, 1, mode="constant", constant_values=True)
    touches = bg[:-2, 1:-1] | bg[2:, 1:-1] | bg[1:-1, :-2] | bg[1:-1, 2:]
    return mask & touches


def sobel_gradient(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(d/drow, d/dcol) from 3x3 Sobel kernels divided by 8, replicate borders."""
    y = check_scalar_map(y)
    gy = ndimage.sobel(y, axis=0, mode="nearest") / 8.0
    gx = ndimage.sobel(y, axis=1, mode="nearest") / 8.0
    return gy, gx


def contour_normals(mask: np.ndarray, sigma: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outward normal field (rows, cols) and its raw norm.

    Taken from the gradient of a Gaussian-smoothed signed distance map that is
    negative inside the mask and positive outside.
    """
    mask = np.asarray(mask, dtype=bool)
    sdf = ndimage.distance_transform_edt(~mask) - ndimage.distance_transform_edt(mask)
    sdf = gaussian_smooth(sdf, sigma)
    ny, nx = np.gradient(sdf)
    norm = np.hypot(ny, nx)
    safe = np.where(norm > 0, norm, 1.0)
    return ny / safe, nx / safe, norm


def g_perp(mask: np.ndarray, y: np.ndarray, normal_sigma: float = 1.0) -> float:
    mask = np.asarray(mask, dtype=bool)
    y = check_scalar_map(y)
    if mask.shape != y.shape:
        raise SizeError(f"mask {mask.shape} and luminance {y.shape} differ in shape")
    edge = boundary_pixels(mask)
    if not edge.any():
        raise DegenerateMaskError("mask has no boundary pixels")
    gy, gx = sobel_gradient(y)
    ny, nx, norm = contour_normals(mask, normal_sigma)
    # normals vanish only on exact symmetry points; those pixels carry no direction
    edge &= norm > 0
    if not edge.any():
        raise DegenerateMaskError("no boundary pixel has a defined normal")
    return float(np.abs(gy[edge] * ny[edge] + gx[edge] * nx[edge]).mean())


@dataclass(frozen=True)
class MetricsRecord:
    image_id: str
    lesion_class: str
    be: float
    tdr: float
    fpr: float
    g_perp: float
    g_perp_gt: float = math.nan


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    cv: float
    n: int


def summarize(values: Sequence[float]) -> SummaryStats:
    """Mean, sample standard deviation (n - 1) and coefficient of variation."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise InsufficientDataError(f"need at least 2 values, got {arr.size}")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1))
    if mean == 0.0:
        raise UndefinedCVError("mean is zero; coefficient of variation is undefined")
    return SummaryStats(mean=mean, std=std, cv=std / mean, n=int(arr.size))


def cv_from_table(mean: float, std: float) -> float:
    if mean == 0.0:
        raise UndefinedCVError("mean is zero; coefficient of variation is undefined")
    return std / mean


def summarize_cell(values: Sequence[float], label: str) -> SummaryStats | None:
    """``summarize`` for report tables: ``None`` when fewer than two values,
    and ``cv`` NaN when the mean is zero. Both cases are logged."""
    try:
        return summarize(values)
    except InsufficientDataError as exc:
        log.warning("%s: %s", label, exc)
        return None
    except UndefinedCVError as exc:
        log.warning("%s: %s", label, exc)
        arr = np.asarray(values, dtype=np.float64)
        return SummaryStats(mean=0.0, std=float(arr.std(ddof=1)), cv=math.nan, n=int(arr.size))


def group_by_class(
    records: Iterable[MetricsRecord],
    metrics: Sequence[str] = ("be", "tdr", "fpr"),
) -> dict[str, dict[str, SummaryStats | None]]:
    """Per-class, per-metric summaries.

    Only classes that occur are returned. A cell with fewer than two records
    holds ``None``; a zero-mean cell has a NaN ``cv``. Both are logged.
    """
    records = sorted(records, key=lambda r: r.image_id)
    by_class: dict[str, list[MetricsRecord]] = {}
    for r in records:
        if r.lesion_class not in LESION_CLASSES:
            raise ValueError(f"record {r.image_id} has unknown class {r.lesion_class!r}")
        by_class.setdefault(r.lesion_class, []).append(r)

    out: dict[str, dict[str, SummaryStats | None]] = {}
    for cls in LESION_CLASSES:
        if cls not in by_class:
            continue
        out[cls] = {}
        for m in metrics:
            out[cls][m] = summarize_cell([getattr(r, m) for r in by_class[cls]], f"class {cls}, metric {m}")
    return out
