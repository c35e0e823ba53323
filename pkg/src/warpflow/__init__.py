"""Mobility / case-count similarity by dynamic time warping, region by region."""

from .analysis import (
    MobilityCaseDTW,
    StdClassifier,
    classify_std,
    lag_sweep,
    pearson,
    run_all,
    run_diagnostics,
    run_region,
)
from .dtw import BandConstraint, dtw_bruteforce, dtw_distance, warp_path
from .ingest import Dataset, FlowRecord, RegionMeta, load_dataset
from .mobility import RollingMean, aggregate_region_mobility, estimate_flow, rolling_mean
from .preprocess import (
    AnalysisConfig,
    MinMaxNormalizer,
    apply_lag,
    build_aligned_pair,
    filter_regions,
    min_max_normalize,
)
from .series import DailySeries
from .synth import ScenarioSpec, gen_dataset

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BandConstraint",
    "DailySeries",
    "Dataset",
    "FlowRecord",
    "MinMaxNormalizer",
    "MobilityCaseDTW",
    "RegionMeta",
    "RollingMean",
    "ScenarioSpec",
    "StdClassifier",
    "aggregate_region_mobility",
    "apply_lag",
    "build_aligned_pair",
    "classify_std",
    "dtw_bruteforce",
    "dtw_distance",
    "estimate_flow",
    "filter_regions",
    "gen_dataset",
    "lag_sweep",
    "load_dataset",
    "min_max_normalize",
    "pearson",
    "rolling_mean",
    "run_all",
    "run_diagnostics",
    "run_region",
    "warp_path",
]
