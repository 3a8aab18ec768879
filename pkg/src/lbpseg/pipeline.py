"""End-to-end segmentation of a single RGB image."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import ClusterResult, kmeans2, lesion_cluster_select
from .errors import DegenerateError, ParameterError, UnsegmentableError
from .features import VARIANTS, FeatureCloud, build_features
from .lbp import flatness_map, lbp_map
from .morphology import clean_mask
from .raster import check_rgb, gaussian_smooth, rescale_minmax, to_luminance


@dataclass(frozen=True)
class PipelineConfig:
    sigma: float = 8.0
    variant: str = "ab"
    seed: int = 0
    restarts: int = 5
    max_iter: int = 100
    tol: float = 1e-4
    postprocess: bool = True

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ParameterError(f"sigma must be >= 0, got {self.sigma}")
        if self.variant not in VARIANTS:
            raise ParameterError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.restarts < 1:
            raise ParameterError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol >= 0:
            raise ParameterError(f"tol must be >= 0, got {self.tol}")


@dataclass(frozen=True)
class Segmentation:
    """Final mask plus the intermediate maps, for diagnostics."""

    mask: np.ndarray
    luminance: np.ndarray
    flatness: np.ndarray
    flatness_smooth: np.ndarray
    features: FeatureCloud
    clusters: ClusterResult
    raw_mask: np.ndarray


def run_pipeline(img: np.ndarray, cfg: PipelineConfig | None = None) -> Segmentation:
    cfg = cfg or PipelineConfig()
    img = check_rgb(img)
    try:
        y = to_luminance(img)
        flat = flatness_map(lbp_map(y))
        l_smooth = rescale_minmax(gaussian_smooth(flat, cfg.sigma))
        cloud = build_features(y, l_smooth, cfg.variant)
        clusters = kmeans2(cloud.points, seed=cfg.seed, restarts=cfg.restarts, max_iter=cfg.max_iter, tol=cfg.tol)
        raw = lesion_cluster_select(clusters, y, l_smooth, cloud.shape)
        mask = clean_mask(raw) if cfg.postprocess else raw
    except DegenerateError as exc:
        raise UnsegmentableError(f"image cannot be segmented: {exc}") from exc
    return Segmentation(mask, y, flat, l_smooth, cloud, clusters, raw)


def segment_image(img: np.ndarray, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Luminance -> LBP -> flatness -> blur -> feature space -> 2-means -> lesion mask."""
    return run_pipeline(img, cfg).mask
