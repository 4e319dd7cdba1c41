"""Evaluation protocol: k-fold cross-validation, metrics and grid search."""

from .metrics import (
    METRIC_NAMES,
    ConfidenceInterval,
    ConfusionCounts,
    MetricSet,
    RocPoint,
    confidence_interval,
    metrics,
    roc_auc,
    t_quantile,
)
from .protocol import (
    SUMMARY_METRICS,
    EvalReport,
    FoldReport,
    FoldSplit,
    GridConfig,
    GridResult,
    HyperGrid,
    cross_validate,
    evaluate_fold,
    grid_search,
    kfold_split,
    summarize,
)

__all__ = (
    "METRIC_NAMES",
    "SUMMARY_METRICS",
    "ConfidenceInterval",
    "ConfusionCounts",
    "EvalReport",
    "FoldReport",
    "FoldSplit",
    "GridConfig",
    "GridResult",
    "HyperGrid",
    "MetricSet",
    "RocPoint",
    "confidence_interval",
    "cross_validate",
    "evaluate_fold",
    "grid_search",
    "kfold_split",
    "metrics",
    "roc_auc",
    "summarize",
    "t_quantile",
)
