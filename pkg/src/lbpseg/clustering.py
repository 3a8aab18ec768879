"""Two-cluster K-means over the feature cloud and lesion-cluster selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDataError, ParameterError, SizeError


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray      # int8, one of {0, 1} per point
    centroids: np.ndarray   # (2, 2)
    sse: float
    iterations: int
    sse_history: tuple[float, ...] = field(default=(), repr=False)


def _sqdist(cols: tuple[np.ndarray, np.ndarray], c: np.ndarray) -> np.ndarray:
    dx = cols[0] - c[0]
    dy = cols[1] - c[1]
    return dx * dx + dy * dy


def _assign(cols, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d0 = _sqdist(cols, centroids[0])
    d1 = _sqdist(cols, centroids[1])
    # ties go to the lower id
    labels = d1 < d0
    return labels, np.where(labels, d1, d0)


def _kmeanspp(points: np.ndarray, cols, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    first = points[rng.integers(n)]
    d2 = _sqdist(cols, first)
    total = d2.sum()
    if total == 0.0:
        second = points[rng.integers(n)]
    else:
        second = points[rng.choice(n, p=d2 / total)]
    return np.stack([first, second]).astype(np.float64)


def _repair_empty(points, cols, centroids, labels, dist):
    for k in (0, 1):
        if not np.any(labels == bool(k)):
            # re-seed the empty centroid at the point farthest from the other one
            far = int(np.argmax(_sqdist(cols, centroids[1 - k])))
            centroids = centroids.copy()
            centroids[k] = points[far]
            labels, dist = _assign(cols, centroids)
    return centroids, labels, dist


def _lloyd(points, cols, centroids, max_iter, stop_shift):
    labels, dist = _assign(cols, centroids)
    centroids, labels, dist = _repair_empty(points, cols, centroids, labels, dist)
    history = [float(dist.sum())]
    it = 0
    while it < max_iter:
        counts = np.bincount(labels, minlength=2)
        new = np.empty_like(centroids)
        for axis in (0, 1):
            new[:, axis] = np.bincount(labels, weights=cols[axis], minlength=2) / counts
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        labels, dist = _assign(cols, new)
        centroids, labels, dist = _repair_empty(points, cols, new, labels, dist)
        history.append(float(dist.sum()))
        it += 1
        if shift <= stop_shift:
            break
    return labels, centroids, history[-1], it, tuple(history)


def kmeans2(
    points: np.ndarray,
    seed: int = 0,
    restarts: int = 5,
    max_iter: int = 100,
    tol: float = 1e-4,
) -> ClusterResult:
    """Lloyd's K-means with K=2, seeded k-means++ init and best-of-``restarts``.

    Iteration stops once no centroid moves more than ``tol`` times the
    bounding-box diagonal of the data, or after ``max_iter`` updates. The
    returned labels are always the nearest-centroid assignment for the
    returned centroids, and ``sse`` is measured against them.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise SizeError(f"expected (N, 2) points, got shape {points.shape}")
    if restarts < 1 or max_iter < 0 or tol < 0:
        raise ParameterError("need restarts >= 1, max_iter >= 0 and tol >= 0")
    if points.shape[0] < 2:
        raise DegenerateDataError("need at least two points")
    if not np.all(np.isfinite(points)):
        raise ParameterError("points contain NaN or infinite values")
    extent = points.max(axis=0) - points.min(axis=0)
    if not np.any(extent > 0):
        raise DegenerateDataError("all points are identical; no 2-clustering exists")
    stop_shift = tol * float(np.hypot(*extent))

    cols = (points[:, 0].copy(), points[:, 1].copy())
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        init = _kmeanspp(points, cols, rng)
        labels, centroids, sse, it, hist = _lloyd(points, cols, init, max_iter, stop_shift)
        if best is None or sse < best.sse:
            best = ClusterResult(labels.astype(np.int8), centroids, sse, it, hist)
    return best


def lesion_cluster_select(
    result: ClusterResult,
    y: np.ndarray,
    l_smooth: np.ndarray | None = None,
    shape: tuple[int, int] | None = None,
) -> np.ndarray:
    """Mark as lesion the cluster with the darker mean luminance.

    Means equal within 1e-9 fall back to the cluster with the higher mean
    smoothed flatness (when ``l_smooth`` is given), then to cluster 0.
    """
    y = np.asarray(y, dtype=np.float64)
    shape = tuple(shape) if shape is not None else y.shape
    labels = np.asarray(result.labels).ravel().astype(np.intp)
    if labels.size != y.size or int(np.prod(shape)) != y.size:
        raise SizeError("cluster labels do not cover every pixel")
    counts = np.bincount(labels, minlength=2).astype(np.float64)
    counts[counts == 0] = np.nan

    mean_y = np.bincount(labels, weights=y.ravel(), minlength=2) / counts
    if abs(mean_y[0] - mean_y[1]) > 1e-9:
        lesion = int(np.nanargmin(mean_y))
    elif l_smooth is not None:
        mean_l = np.bincount(labels, weights=np.asarray(l_smooth, dtype=np.float64).ravel(), minlength=2) / counts
        lesion = 1 if mean_l[1] > mean_l[0] else 0
    else:
        lesion = 0
    return (labels == lesion).reshape(shape)
