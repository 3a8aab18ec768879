"""Dermoscopic lesion segmentation by clustering LBP flatness and luminance."""

from .clustering import ClusterResult, kmeans2, lesion_cluster_select
from .features import FeatureCloud, build_features, yl_to_ab, znormalize
from .harness import DatasetRecord, apply_exclusions, evaluate_dataset, load_manifest
from .lbp import (
    ClassPresence,
    LbpMap,
    flatness_map,
    lbp_code,
    lbp_map,
    presence_analysis,
    ri_class,
    transition_count,
)
from .metrics import MetricsRecord, SummaryStats, border_error, fpr, g_perp, group_by_class, summarize, tdr
from .morphology import fill_holes, keep_principal_component
from .pipeline import PipelineConfig, run_pipeline, segment_image
from .raster import gaussian_smooth, rescale_minmax, to_luminance

__version__ = "0.1.0"
