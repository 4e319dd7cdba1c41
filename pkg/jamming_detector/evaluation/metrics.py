"""Confusion metrics, ROC/AUC and Student-t confidence intervals."""

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from jamming_detector.exceptions import InsufficientDataError

METRIC_NAMES = ("accuracy", "tpr_predictive", "tnr_predictive", "recall", "specificity")


class ConfusionCounts(NamedTuple):
    """Confusion matrix with jammed as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    @classmethod
    def from_scores(
        cls, unjammed_scores: Sequence[float], jammed_scores: Sequence[float], tau: float
    ) -> "ConfusionCounts":
        """Count decisions `score >= tau` for both test sets."""
        unjammed = np.asarray(unjammed_scores, dtype=np.float64)
        jammed = np.asarray(jammed_scores, dtype=np.float64)
        tp = int(np.count_nonzero(jammed >= tau))
        fp = int(np.count_nonzero(unjammed >= tau))
        return cls(tp=tp, fp=fp, tn=unjammed.size - fp, fn=jammed.size - tp)


class MetricSet(NamedTuple):
    """Ratios derived from a confusion matrix; `None` marks a zero denominator.

    `tpr_predictive = TP / (TP + FP)` and `tnr_predictive = TN / (TN + FN)` are the predictive-value forms of the rates,
    `recall` and `specificity` the conventional detection and true-negative rates.
    """

    accuracy: Optional[float]
    tpr_predictive: Optional[float]
    tnr_predictive: Optional[float]
    recall: Optional[float]
    specificity: Optional[float]


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator else None


def metrics(counts: ConfusionCounts) -> MetricSet:
    """All ratios of a confusion matrix."""
    if min(counts) < 0:
        raise ValueError(f"Confusion counts must not be negative: {counts}")
    tp, fp, tn, fn = counts
    return MetricSet(
        accuracy=_ratio(tp + tn, tp + fp + fn + tn),
        tpr_predictive=_ratio(tp, tp + fp),
        tnr_predictive=_ratio(tn, tn + fn),
        recall=_ratio(tp, tp + fn),
        specificity=_ratio(tn, tn + fp),
    )


class RocPoint(NamedTuple):
    """Operating point of the decision `score >= threshold`."""

    threshold: float
    fpr: float
    tpr: float


def roc_auc(unjammed_scores: Sequence[float], jammed_scores: Sequence[float]) -> Tuple[List[RocPoint], float]:
    """ROC curve over all distinct thresholds and the Mann-Whitney AUC, ties counted as one half."""
    negatives = np.sort(np.asarray(unjammed_scores, dtype=np.float64))
    positives = np.sort(np.asarray(jammed_scores, dtype=np.float64))
    if not negatives.size or not positives.size:
        raise InsufficientDataError("ROC needs at least one unjammed and one jammed score")

    below = np.searchsorted(negatives, positives, side="left")
    ties = np.searchsorted(negatives, positives, side="right") - below
    auc = (float(below.sum()) + 0.5 * float(ties.sum())) / (positives.size * negatives.size)

    points = [RocPoint(math.inf, 0.0, 0.0)]
    for threshold in np.unique(np.concatenate([negatives, positives]))[::-1]:
        false_positives = negatives.size - np.searchsorted(negatives, threshold, side="left")
        true_positives = positives.size - np.searchsorted(positives, threshold, side="left")
        points.append(RocPoint(float(threshold), false_positives / negatives.size, true_positives / positives.size))
    return points, auc


def t_quantile(p: float, df: float) -> float:
    """Quantile of Student's t distribution with `df` degrees of freedom."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if not df > 0:
        raise ValueError("df must be positive")
    return float(stats.t.ppf(p, df))


class ConfidenceInterval(NamedTuple):
    """Mean with its two-sided confidence bounds."""

    mean: float
    lo: float
    hi: float


def confidence_interval(values: Sequence[float], level: float = 0.95) -> ConfidenceInterval:
    """`mean +- t(k - 1, (1 + level) / 2) * s / sqrt(k)` with the sample standard deviation `s`."""
    data = np.asarray(values, dtype=np.float64)
    if data.size < 2:  # noqa: PLR2004
        raise InsufficientDataError(f"Confidence interval needs at least 2 values, got {data.size}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    if np.all(data == data[0]):
        value = float(data[0])
        return ConfidenceInterval(value, value, value)
    mean = float(data.mean())
    half_width = t_quantile((1.0 + level) / 2.0, data.size - 1) * float(data.std(ddof=1)) / math.sqrt(data.size)
    return ConfidenceInterval(mean, mean - half_width, mean + half_width)
