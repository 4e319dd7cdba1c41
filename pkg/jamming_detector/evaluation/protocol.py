"""k-fold evaluation protocol and hyperparameter grid search."""

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from pydantic import Field, validator

from jamming_detector.autoencoder import (
    Architecture,
    ThresholdPolicy,
    TrainConfig,
    Transfer,
    score_images,
    threshold_from_stats,
    train,
    training_stats,
)
from jamming_detector.base import ConfigModel, logger
from jamming_detector.exceptions import ConfigurationError, InsufficientDataError, JammingDetectorError
from jamming_detector.imaging import HistogramImage, stack_gray
from jamming_detector.utils import derive_seed

from .metrics import (
    METRIC_NAMES,
    ConfidenceInterval,
    ConfusionCounts,
    MetricSet,
    RocPoint,
    confidence_interval,
    metrics,
    roc_auc,
)

Item = TypeVar("Item")
Images = Union[np.ndarray, Sequence[HistogramImage]]

SUMMARY_METRICS = (*METRIC_NAMES, "auc")


class FoldSplit(NamedTuple):
    """Test subsets of one fold."""

    index: int
    unjammed: List[Any]
    jammed: List[Any]


def kfold_split(unjammed: Sequence[Item], jammed: Sequence[Item], k: int, seed: int) -> List[FoldSplit]:
    """Shuffle both lists with the seed and cut each into `k` near-equal disjoint subsets."""
    if k < 2:  # noqa: PLR2004
        raise ConfigurationError(f"k-fold needs k >= 2, got {k}")
    if len(unjammed) < k or len(jammed) < k:
        raise InsufficientDataError(
            f"k-fold with k={k} needs at least k images per class, "
            f"got {len(unjammed)} unjammed and {len(jammed)} jammed"
        )

    rng = np.random.default_rng(seed)
    unjammed_parts = np.array_split(rng.permutation(len(unjammed)), k)
    jammed_parts = np.array_split(rng.permutation(len(jammed)), k)
    return [
        FoldSplit(
            index,
            [unjammed[int(position)] for position in unjammed_part],
            [jammed[int(position)] for position in jammed_part],
        )
        for index, (unjammed_part, jammed_part) in enumerate(zip(unjammed_parts, jammed_parts))
    ]


class FoldReport(NamedTuple):
    """Outcome of one fold."""

    fold_index: int
    counts: ConfusionCounts
    metrics: MetricSet
    auc: float
    tau: float
    unjammed_mses: List[float]
    jammed_mses: List[float]
    roc: List[RocPoint]
    train_set_size: int

    def metric(self, name: str) -> Optional[float]:
        """Any of the summary metrics by name, `auc` included."""
        if name == "auc":
            return self.auc
        return getattr(self.metrics, name)


def _matrix(images: Images) -> np.ndarray:
    return images if isinstance(images, np.ndarray) else stack_gray(images)


def evaluate_fold(  # pylint: disable=too-many-arguments
    train_unjammed: Images,
    test_unjammed: Images,
    test_jammed: Images,
    arch: Architecture,
    cfg: TrainConfig,
    fold_index: int = 0,
    policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD,
) -> FoldReport:
    """Train on unjammed images only, then score and classify both test sets."""
    train_matrix = _matrix(train_unjammed)
    unjammed_matrix = _matrix(test_unjammed)
    jammed_matrix = _matrix(test_jammed)
    if not (train_matrix.size and unjammed_matrix.size and jammed_matrix.size):
        raise InsufficientDataError("Training and both test sets must be non-empty")

    result = train(train_matrix, cfg, arch)
    tau = threshold_from_stats(training_stats(result.train_mses), policy)
    unjammed_mses = score_images(result.model, unjammed_matrix)
    jammed_mses = score_images(result.model, jammed_matrix)

    counts = ConfusionCounts.from_scores(unjammed_mses, jammed_mses, tau)
    roc, auc = roc_auc(unjammed_mses, jammed_mses)
    logger.debug("Evaluated fold", fold=fold_index, tau=tau, auc=auc, **counts._asdict())
    return FoldReport(
        fold_index=fold_index,
        counts=counts,
        metrics=metrics(counts),
        auc=auc,
        tau=tau,
        unjammed_mses=[float(value) for value in unjammed_mses],
        jammed_mses=[float(value) for value in jammed_mses],
        roc=roc,
        train_set_size=int(train_matrix.shape[0]),
    )


class EvalReport(NamedTuple):
    """Per-fold reports, confidence intervals per metric and the configuration echo."""

    folds: List[FoldReport]
    summary: Dict[str, Optional[ConfidenceInterval]]
    config: Dict[str, Any]

    @property
    def mean_auc(self) -> float:
        """Average fold AUC, the grid-search ranking key."""
        return float(np.mean([fold.auc for fold in self.folds]))


def summarize(folds: Sequence[FoldReport], level: float = 0.95) -> Dict[str, Optional[ConfidenceInterval]]:
    """Mean and confidence interval of every metric over the defined fold values."""
    summary = {}
    for name in SUMMARY_METRICS:
        values = [fold.metric(name) for fold in folds]
        defined = [value for value in values if value is not None]
        if len(defined) < len(values):
            logger.warning("Undefined metric excluded from the average", metric=name, folds=len(values) - len(defined))
        summary[name] = confidence_interval(defined, level) if len(defined) >= 2 else None  # noqa: PLR2004
    return summary


def _run(function: Callable, items: Iterable, workers: int) -> List:
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, items))
    return [function(item) for item in items]


def cross_validate(  # pylint: disable=too-many-arguments,too-many-locals
    unjammed: Images,
    jammed: Images,
    arch: Architecture,
    cfg: TrainConfig,
    k: int = 10,
    seed: int = 0,
    workers: int = 1,
    train_size: Optional[int] = None,
    policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD,
    config: Optional[Dict[str, Any]] = None,
    level: float = 0.95,
) -> EvalReport:
    """Run the k-fold protocol.

    Fold `i` trains on the unjammed images outside subset `i` and tests on the `i`-th unjammed and jammed subsets.
    The split seed and every fold's training seed are derived from `seed`, so results don't depend on `workers`.
    `train_size` keeps only that many training images per fold.
    """
    unjammed_matrix = _matrix(unjammed)
    jammed_matrix = _matrix(jammed)
    splits = kfold_split(
        list(range(unjammed_matrix.shape[0])), list(range(jammed_matrix.shape[0])), k, derive_seed(seed, "kfold")
    )

    def run_fold(split: FoldSplit) -> FoldReport:
        test = set(split.unjammed)
        training = [index for other in splits if other.index != split.index for index in other.unjammed]
        if train_size is not None:
            if train_size > len(training):
                raise InsufficientDataError(f"Requested {train_size} training images, only {len(training)} available")
            training = training[:train_size]
        assert test.isdisjoint(training), "fold test images leaked into training"  # noqa: S101
        fold_cfg = cfg.copy(update={"seed": derive_seed(seed, "train", split.index)})
        return evaluate_fold(
            unjammed_matrix[training],
            unjammed_matrix[split.unjammed],
            jammed_matrix[split.jammed],
            arch,
            fold_cfg,
            fold_index=split.index,
            policy=policy,
        )

    folds = _run(run_fold, splits, workers)
    echo = {
        "k": k,
        "seed": seed,
        "train_size": train_size,
        "threshold_policy": policy.value,
        "architecture": arch.echo(),
        "train": cfg.echo(),
        **(config or {}),
    }
    report = EvalReport(folds, summarize(folds, level), echo)
    logger.info("Cross-validated", folds=k, mean_auc=report.mean_auc, k_hidden=arch.k_hidden)
    return report


class GridConfig(NamedTuple):
    """One hyperparameter combination."""

    k_hidden: int
    sparsity_weight: float
    l2_weight: float
    enc_transfer: Transfer

    @property
    def name(self) -> str:
        """Compact identifier, e.g. `k16-b0.5-l0.01-logsig`."""
        return f"k{self.k_hidden}-b{self.sparsity_weight:g}-l{self.l2_weight:g}-{self.enc_transfer.value}"

    def sort_key(self) -> Tuple:
        """Lexicographic order of the combination."""
        return (self.k_hidden, self.sparsity_weight, self.l2_weight, self.enc_transfer.value)


class HyperGrid(ConfigModel):
    """Hyperparameter values searched by `grid_search`."""

    hidden_sizes: Tuple[int, ...] = (8, 16, 32, 64)
    sparsity_weights: Tuple[float, ...] = (1.0, 0.5, 0.0)
    l2_weights: Tuple[float, ...] = (0.01, 0.001, 0.0001)
    encoders: Tuple[Transfer, ...] = (Transfer.LOGSIG, Transfer.SATLIN)

    @validator("hidden_sizes", "sparsity_weights", "l2_weights", "encoders")
    def _not_empty(cls, value):  # pylint: disable=no-self-argument
        if not value:
            raise ValueError("grid dimensions must not be empty")
        return value

    @validator("hidden_sizes", each_item=True)
    def _positive(cls, value):  # pylint: disable=no-self-argument
        if value < 1:
            raise ValueError("hidden sizes must be >= 1")
        return value

    @validator("encoders", pre=True)
    def _parse_encoders(cls, value):  # pylint: disable=no-self-argument
        if isinstance(value, (str, Transfer)):
            value = [value]
        encoders = tuple(Transfer.parse(item) for item in value)
        if Transfer.PURELIN in encoders:
            raise ValueError("The encoder transfer function must be logsig or satlin")
        return encoders

    def configurations(self) -> List[GridConfig]:
        """Cross product of all dimensions, in lexicographic order."""
        combos = itertools.product(self.hidden_sizes, self.sparsity_weights, self.l2_weights, self.encoders)
        return sorted((GridConfig(*combo) for combo in combos), key=GridConfig.sort_key)


class GridResult(NamedTuple):
    """Ranked outcome of one configuration; failed configurations keep the error instead of a report."""

    rank: int
    config: GridConfig
    report: Optional[EvalReport]
    error: Optional[str] = None

    @property
    def mean_auc(self) -> Optional[float]:
        """Average fold AUC, `None` for failed configurations."""
        return self.report.mean_auc if self.report else None


def grid_search(  # pylint: disable=too-many-arguments
    unjammed: Images,
    jammed: Images,
    grid: HyperGrid,
    cfg: TrainConfig,
    k: int = 10,
    seed: int = 0,
    workers: int = 1,
    train_size: Optional[int] = None,
    policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD,
    level: float = 0.95,
) -> List[GridResult]:
    """Cross-validate every configuration on the same folds and rank them by mean AUC.

    Ties go to the smaller hidden size, then to the lexicographic configuration order. Failed configurations are
    ranked last.
    """
    unjammed_matrix = _matrix(unjammed)
    jammed_matrix = _matrix(jammed)
    configurations = grid.configurations()

    def run_config(config: GridConfig) -> Tuple[Optional[EvalReport], Optional[str]]:
        arch = Architecture(k_hidden=config.k_hidden, enc_transfer=config.enc_transfer)
        config_cfg = cfg.copy(update={"sparsity_weight": config.sparsity_weight, "l2_weight": config.l2_weight})
        try:
            report = cross_validate(
                unjammed_matrix,
                jammed_matrix,
                arch,
                config_cfg,
                k=k,
                seed=seed,
                train_size=train_size,
                policy=policy,
                config={"grid_config": config.name},
                level=level,
            )
        except JammingDetectorError as error:
            logger.warning("Grid configuration failed", config=config.name, error=str(error))
            return None, str(error)
        return report, None

    outcomes = _run(run_config, configurations, workers)

    def ranking_key(position: int):
        config = configurations[position]
        report = outcomes[position][0]
        return (report is None, -report.mean_auc if report else 0.0, *config.sort_key(), position)

    order = sorted(range(len(configurations)), key=ranking_key)
    results = [
        GridResult(rank, configurations[position], *outcomes[position]) for rank, position in enumerate(order, start=1)
    ]
    if results and results[0].report:
        logger.info("Best configuration", config=results[0].config.name, mean_auc=results[0].mean_auc)
    return results
