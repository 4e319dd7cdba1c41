"""Declarative experiment sweeps: simulate, encode and cross-validate every sweep point.

Every random stage draws its seed from `derive_seed(master_seed, stage, point)`, so a point can be reproduced on its
own and results don't depend on the sweep order or on the number of workers.
"""

import itertools
import math
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

import toml
from pydantic import Field, ValidationError, validator

from .autoencoder import Architecture, ThresholdPolicy, TrainConfig
from .base import ConfigModel, JammerKind, Pathable, logger
from .evaluation import EvalReport, HyperGrid, cross_validate, grid_search
from .exceptions import ConfigurationError, JammingDetectorError
from .imaging import AutoExtent, ImageConfig, PlaneExtent, compute_extent, stack_gray, window_stream
from .simulation import JammerConfig, LinkConfig, hardware_profile, measure_ber, simulate_link
from .summary import EvaluationSummary, PointSummary, write_fold_report
from .utils import derive_seed, provenance


def _known_hardware(value: str) -> str:
    hardware_profile(value)
    return value


class LinkSection(ConfigModel):
    """Parameters of the legitimate link shared by all points."""

    snr_db: float = 15.0
    agc: bool = True
    phase_noise_std: float = Field(0.0, ge=0.0)
    receiver: str = "ideal"
    payload_hex: Optional[str] = None

    _check_receiver = validator("receiver", allow_reuse=True)(_known_hardware)


class SweepSection(ConfigModel):
    """Sweep dimensions; every combination is one point."""

    kinds: Tuple[JammerKind, ...] = (JammerKind.GAUSSIAN,)
    rjp: Tuple[float, ...] = (0.1,)
    ror: Tuple[int, ...] = (1,)
    jor: Tuple[int, ...] = (1,)
    n: Tuple[int, ...] = ()
    train_sizes: Tuple[int, ...] = ()
    jammer_hardware: Tuple[str, ...] = ("ideal",)
    tone_offset: float = 0.0

    @validator("kinds", pre=True)
    def _parse_kinds(cls, value):  # pylint: disable=no-self-argument
        kinds = tuple(JammerKind.parse(item) for item in ([value] if isinstance(value, str) else value))
        if JammerKind.NONE in kinds:
            raise ValueError("sweep kinds must be jammers, unjammed data is generated for every point")
        return kinds

    @validator("kinds", "rjp", "ror", "jor", "jammer_hardware")
    def _not_empty(cls, value):  # pylint: disable=no-self-argument
        if not value:
            raise ValueError("sweep dimension must not be empty")
        return value

    @validator("rjp", each_item=True)
    def _rjp_range(cls, value):  # pylint: disable=no-self-argument
        if not (math.isfinite(value) and value >= 0):
            raise ValueError("rjp must be a finite non-negative number")
        return value

    @validator("ror", "jor", "n", each_item=True)
    def _positive(cls, value):  # pylint: disable=no-self-argument
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @validator("train_sizes", each_item=True)
    def _train_size(cls, value):  # pylint: disable=no-self-argument
        if value < 2:  # noqa: PLR2004
            raise ValueError("training sets need at least 2 images")
        return value

    _check_hardware = validator("jammer_hardware", each_item=True, allow_reuse=True)(_known_hardware)


class DatasetSection(ConfigModel):
    """Number of images synthesized per point."""

    unjammed_images: int = Field(60, ge=2)
    jammed_images: int = Field(60, ge=1)
    calibration_windows: int = Field(1, ge=1)


class EvaluationSection(ConfigModel):
    """Cross-validation settings."""

    k: int = Field(10, ge=2)
    threshold_policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD
    level: float = Field(0.95, gt=0.0, lt=1.0)
    workers: int = Field(1, ge=1)


class ExperimentConfig(ConfigModel):
    """One experiment, usually loaded from a TOML file."""

    master_seed: int = Field(..., ge=0, le=2**64 - 1)
    output_dir: str = "results"
    link: LinkSection = LinkSection()
    sweep: SweepSection = SweepSection()
    dataset: DatasetSection = DatasetSection()
    image: ImageConfig = ImageConfig()
    train: TrainConfig = TrainConfig()
    architecture: Architecture = Architecture()
    evaluation: EvaluationSection = EvaluationSection()
    grid: Optional[HyperGrid] = None

    def points(self) -> List["ExperimentPoint"]:
        """All sweep points in a fixed order."""
        sweep = self.sweep
        combos = itertools.product(
            sweep.kinds,
            sweep.rjp,
            sweep.ror,
            sweep.jor,
            sweep.n or (self.image.n,),
            sweep.train_sizes or (None,),
            sweep.jammer_hardware,
        )
        return [ExperimentPoint(*combo) for combo in combos]


def load_experiment(path: Pathable) -> ExperimentConfig:
    """Parse and validate a TOML experiment file."""
    try:
        content = toml.load(str(path))
    except toml.TomlDecodeError as error:
        raise ConfigurationError(f"{path}: {error}") from error
    try:
        return ExperimentConfig.parse_obj(content)
    except ValidationError as error:
        raise ConfigurationError(f"{path}: {error}") from error


class ExperimentPoint(NamedTuple):
    """One combination of the sweep dimensions."""

    kind: JammerKind
    rjp: float
    ror: int
    jor: int
    n: int
    train_size: Optional[int]
    hardware: str

    def key(self) -> Dict[str, object]:
        """Columns identifying the point in `summary.csv`."""
        return {
            "rjp": self.rjp,
            "jammer": self.kind.value,
            "ror": self.ror,
            "jor": self.jor,
            "n": self.n,
            "train_size": self.train_size,
            "hardware": self.hardware,
        }

    @property
    def slug(self) -> str:
        """Directory name and seed index of the point."""
        train_size = "all" if self.train_size is None else self.train_size
        return f"{self.kind.value}-rjp{self.rjp!r}-ror{self.ror}-jor{self.jor}-n{self.n}-t{train_size}-{self.hardware}"


def config_echo(config: ExperimentConfig) -> Dict[str, object]:
    """Configuration echo for provenance, without the worker count."""
    echo = config.echo()
    echo["evaluation"].pop("workers", None)
    return echo


class PointData(NamedTuple):
    """Images synthesized for one point."""

    unjammed: list
    jammed: list
    extent: PlaneExtent
    ber: float


def _link(config: ExperimentConfig, point: ExperimentPoint, images: int, seed: int) -> LinkConfig:
    section = config.link
    fields = {
        "num_symbols": -(-images * point.n // point.ror),
        "snr_db": section.snr_db,
        "ror": point.ror,
        "agc": section.agc,
        "phase_noise_std": section.phase_noise_std,
        "seed": seed,
        "receiver": section.receiver,
    }
    if section.payload_hex:
        fields["payload"] = section.payload_hex
    return LinkConfig(**fields)


def synthesize_point(config: ExperimentConfig, point: ExperimentPoint) -> PointData:
    """Simulate the calibration, unjammed and jammed recordings of a point and encode them."""
    master = config.master_seed
    image_config = config.image.copy(update={"n": point.n})
    dataset = config.dataset
    workers = config.evaluation.workers
    no_jammer = JammerConfig()

    if isinstance(image_config.extent_policy, AutoExtent):
        calibration = simulate_link(
            _link(config, point, dataset.calibration_windows, derive_seed(master, "calibration", point.slug)),
            no_jammer,
        )
        calibration_samples = calibration.samples[: dataset.calibration_windows * point.n]
        extent = compute_extent(calibration_samples, image_config.extent_policy)
    else:
        extent = compute_extent([], image_config.extent_policy)

    unjammed_rec = simulate_link(
        _link(config, point, dataset.unjammed_images, derive_seed(master, "unjammed", point.slug)), no_jammer
    )
    jammer = JammerConfig(
        kind=point.kind,
        rjp=point.rjp,
        jor=point.jor,
        tone_offset=config.sweep.tone_offset,
        seed=derive_seed(master, "jammer", point.slug),
        hardware=point.hardware,
    )
    jammed_rec = simulate_link(
        _link(config, point, dataset.jammed_images, derive_seed(master, "jammed", point.slug)), jammer
    )

    unjammed = window_stream(unjammed_rec, image_config, extent, workers)[: dataset.unjammed_images]
    jammed = window_stream(jammed_rec, image_config, extent, workers)[: dataset.jammed_images]
    return PointData(unjammed, jammed, extent, measure_ber(jammed_rec))


def evaluate_point(
    config: ExperimentConfig, point: ExperimentPoint, directory: Path
) -> Tuple[EvalReport, float, Optional[list]]:
    """Cross-validate one point, writing its fold and score CSVs into `directory`."""
    data = synthesize_point(config, point)
    unjammed = stack_gray(data.unjammed)
    jammed = stack_gray(data.jammed)
    section = config.evaluation
    seed = derive_seed(config.master_seed, "evaluate", point.slug)
    header = provenance(config.master_seed, config_echo(config), point=point.slug)

    ranking = None
    if config.grid is not None:
        ranking = grid_search(
            unjammed,
            jammed,
            config.grid,
            config.train,
            k=section.k,
            seed=seed,
            workers=section.workers,
            train_size=point.train_size,
            policy=section.threshold_policy,
            level=section.level,
        )
        best = ranking[0]
        if best.report is None:
            raise JammingDetectorError(f"Every grid configuration failed, first error: {best.error}")
        report = best.report
        grid_summary = EvaluationSummary(header)
        grid_summary.grid = ranking
        directory.mkdir(parents=True, exist_ok=True)
        grid_summary.dump(directory / "grid.csv", "grid")
    else:
        report = cross_validate(
            unjammed,
            jammed,
            config.architecture,
            config.train,
            k=section.k,
            seed=seed,
            workers=section.workers,
            train_size=point.train_size,
            policy=section.threshold_policy,
            config={"point": point.slug},
            level=section.level,
        )

    write_fold_report(report, directory, header)
    return report, data.ber, ranking


def run_experiment(config: ExperimentConfig, output_dir: Optional[Pathable] = None) -> EvaluationSummary:
    """Evaluate every sweep point; a failing point is recorded and the sweep continues."""
    output = Path(output_dir or config.output_dir)
    output.mkdir(parents=True, exist_ok=True)
    summary = EvaluationSummary(provenance(config.master_seed, config_echo(config)))

    points = config.points()
    for number, point in enumerate(points, start=1):
        logger.info("Evaluating sweep point", point=point.slug, number=number, total=len(points))
        try:
            report, ber, ranking = evaluate_point(config, point, output / "points" / point.slug)
        except JammingDetectorError as error:
            logger.warning("Sweep point failed", point=point.slug, error=str(error))
            summary.points.append(PointSummary.failed(point.key(), str(error)))
            continue
        summary.points.append(PointSummary.from_report(point.key(), report, ber))
        if ranking is not None and len(points) == 1:
            summary.grid = ranking

    summary.dump(output / "summary.csv", "csv")
    summary.dump(output / "summary.txt", "text")
    if summary.grid:
        summary.dump(output / "grid.csv", "grid")
    return summary
