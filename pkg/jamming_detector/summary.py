"""Evaluation summary module.

Every CSV written here starts with `# schema=jamdet-eval/1` followed by `# key=value` provenance lines. Undefined
metrics are written as empty cells.
"""

import csv
from pathlib import Path
from typing import Dict, Generator, Iterable, List, Mapping, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np

from .base import Pathable
from .evaluation import SUMMARY_METRICS, ConfidenceInterval, EvalReport, GridResult
from .exceptions import ConfigurationError, FileFormatError
from .utils import comment_lines, format_float

CSV_SCHEMA = "jamdet-eval/1"
POINT_KEYS = ("rjp", "jammer", "ror", "jor", "n", "train_size", "hardware")
REPORT_KINDS = {
    "rjp": "rjp",
    "nsamples": "n",
    "trainsize": "train_size",
    "jor": "jor",
    "ber": "rjp",
}
PLOT_COLUMNS = ("x", "mean", "ci_lo", "ci_hi")
HISTOGRAM_COLUMNS = ("bin_lo", "bin_hi", "unjammed", "jammed")

_FILL_UP_LENGTH = 100


def _fill_up(*values) -> str:
    fill = values[0][0]
    result = " ".join(str(value) for value in values) + " " + fill
    return result + (fill * (_FILL_UP_LENGTH - len(result)))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _key_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return _cell(value)


def _number(value: str) -> Optional[float]:
    return float(value) if value != "" else None


def write_csv_stream(
    file: TextIO,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    provenance: Optional[Mapping[str, str]] = None,
):
    """Write a schema-tagged CSV document to an open text file."""
    file.write(f"# schema={CSV_SCHEMA}\n")
    for line in comment_lines(provenance or {}):
        file.write(line + "\n")
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(value) for value in row])


def write_csv(
    path: Pathable,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    provenance: Optional[Mapping[str, str]] = None,
):
    """Write a schema-tagged CSV file."""
    with open(path, "w", encoding="utf-8", newline="") as file:
        write_csv_stream(file, columns, rows, provenance)


def read_csv(path: Pathable) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    """Read a file written by `write_csv`, returning its header comments and rows."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = {}
    position = 0
    while position < len(lines) and lines[position].startswith("#"):
        key, _, value = lines[position][1:].strip().partition("=")
        header[key] = value
        position += 1
    if header.get("schema") != CSV_SCHEMA:
        raise FileFormatError(f"{path}: expected schema {CSV_SCHEMA}, got {header.get('schema')}")
    rows = list(csv.DictReader(lines[position:]))
    return header, rows


FOLD_COLUMNS = ("fold", "tp", "fp", "tn", "fn", *SUMMARY_METRICS, "tau", "train_set_size")


def write_fold_report(report: EvalReport, directory: Pathable, provenance: Optional[Mapping[str, str]] = None):
    """Write `folds.csv` (one row per fold plus a summary row of means) and `scores.csv`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def fold_rows():
        for fold in report.folds:
            yield (
                fold.fold_index,
                *fold.counts,
                *(fold.metric(name) for name in SUMMARY_METRICS),
                fold.tau,
                fold.train_set_size,
            )
        totals = np.sum([list(fold.counts) for fold in report.folds], axis=0) if report.folds else [0, 0, 0, 0]
        means = [report.summary[name].mean if report.summary.get(name) else None for name in SUMMARY_METRICS]
        taus = [fold.tau for fold in report.folds]
        yield ("summary", *(int(value) for value in totals), *means, float(np.mean(taus)) if taus else None, "")

    def score_rows():
        for fold in report.folds:
            for label, scores in (("Unjammed", fold.unjammed_mses), ("Jammed", fold.jammed_mses)):
                for score in scores:
                    yield fold.fold_index, label, score

    write_csv(directory / "folds.csv", FOLD_COLUMNS, fold_rows(), provenance)
    write_csv(directory / "scores.csv", ("fold", "label", "mse"), score_rows(), provenance)


class PointSummary(NamedTuple):
    """Outcome of one sweep point: confidence intervals per metric, measured BER, or the failure."""

    key: Dict[str, str]
    summary: Dict[str, Optional[ConfidenceInterval]]
    ber: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def from_report(cls, key: Mapping[str, object], report: EvalReport, ber: Optional[float] = None) -> "PointSummary":
        """Summarize a successful point."""
        return cls({name: _key_cell(key.get(name)) for name in POINT_KEYS}, dict(report.summary), ber)

    @classmethod
    def failed(cls, key: Mapping[str, object], error: str, ber: Optional[float] = None) -> "PointSummary":
        """Record a failed point."""
        return cls({name: _key_cell(key.get(name)) for name in POINT_KEYS}, {}, ber, error)


def _summary_columns() -> List[str]:
    columns = list(POINT_KEYS)
    for name in SUMMARY_METRICS:
        columns.extend((f"{name}_mean", f"{name}_ci_lo", f"{name}_ci_hi"))
    columns.extend(("ber", "error"))
    return columns


class EvaluationSummary:
    """Combined results of an experiment sweep."""

    def __init__(self, provenance: Optional[Mapping[str, str]] = None):
        """Initialize the evaluation summary."""
        self.provenance: Dict[str, str] = dict(provenance or {})
        self.points: List[PointSummary] = []
        self.grid: List[GridResult] = []

    def load(self, path: Pathable):
        """Load points from a `summary.csv` file."""
        header, rows = read_csv(path)
        header.pop("schema", None)
        self.provenance.update(header)
        for row in rows:
            missing = set(_summary_columns()) - set(row)
            if missing:
                raise FileFormatError(f"{path}: missing columns {sorted(missing)}")
            summary = {}
            for name in SUMMARY_METRICS:
                mean = _number(row[f"{name}_mean"])
                summary[name] = (
                    None
                    if mean is None
                    else ConfidenceInterval(mean, float(row[f"{name}_ci_lo"]), float(row[f"{name}_ci_hi"]))
                )
            self.points.append(
                PointSummary(
                    {name: row[name] for name in POINT_KEYS}, summary, _number(row["ber"]), row["error"] or None
                )
            )

    def rows(self) -> Generator[List, None, None]:
        """Rows of `summary.csv`."""
        for point in self.points:
            row: List = [point.key.get(name, "") for name in POINT_KEYS]
            for name in SUMMARY_METRICS:
                interval = point.summary.get(name)
                row.extend(interval if interval else (None, None, None))
            row.extend((point.ber, point.error))
            yield row

    def grid_rows(self) -> Generator[List, None, None]:
        """Rows of `grid.csv`."""
        for result in self.grid:
            config = result.config
            yield [
                result.rank,
                config.name,
                config.k_hidden,
                config.sparsity_weight,
                config.l2_weight,
                config.enc_transfer.value,
                result.mean_auc,
                result.error,
            ]

    def dump(self, path: Pathable, output_format="csv"):
        """Dump the summary to a file."""
        if output_format == "csv":
            write_csv(path, _summary_columns(), self.rows(), self.provenance)
        elif output_format == "grid":
            columns = ("rank", "config", "k_hidden", "sparsity_weight", "l2_weight", "encoder", "mean_auc", "error")
            write_csv(path, columns, self.grid_rows(), self.provenance)
        elif output_format == "text":
            with open(path, "w", encoding="utf-8") as file:
                for line in self.get_summary():
                    file.write(line + "\n")
        else:
            raise ValueError(f"Unsupported format {output_format}")

    def get_summary(self) -> Generator[str, None, None]:
        """Get a human-readable summary of the sweep."""
        yield _fill_up("* Evaluation Summary:")
        yield _fill_up("= Provenance:")
        for key, value in self.provenance.items():
            yield f"{key}: {value}"

        yield _fill_up("= Points:")
        for point in self.points:
            yield _fill_up("-", " ".join(f"{key}={value}" for key, value in point.key.items() if value != ""))
            if point.error:
                yield f"FAILED: {point.error}"
            for name, interval in point.summary.items():
                if interval is None:
                    yield f"{name}: undefined"
                else:
                    yield f"{name}: {interval.mean:.4f} [{interval.lo:.4f}, {interval.hi:.4f}]"
            if point.ber is not None:
                yield f"ber: {point.ber:.6g}"

        if self.grid:
            yield _fill_up("= Hyperparameter Ranking:")
            for result in self.grid:
                outcome = f"{result.mean_auc:.6f}" if result.report else f"FAILED: {result.error}"
                yield f"{result.rank:>3} {result.config.name} {outcome}"

        yield _fill_up("* End of Evaluation Summary")


def _matches(key: Mapping[str, str], where: Mapping[str, str]) -> bool:
    for name, value in where.items():
        if name not in key:
            raise ConfigurationError(f"Unknown filter column `{name}`, expected one of {POINT_KEYS}")
        if key[name] != value and _number_or_text(key[name]) != _number_or_text(value):
            return False
    return True


def _number_or_text(value: str):
    try:
        return float(value)
    except ValueError:
        return value


def plot_rows(
    points: Iterable[PointSummary], kind: str, metric: str = "accuracy", where: Optional[Mapping[str, str]] = None
) -> List[Tuple]:
    """`(x, mean, ci_lo, ci_hi)` rows sorted by x; kind `ber` reports the measured BER with a zero-width interval."""
    if kind not in REPORT_KINDS:
        raise ConfigurationError(f"Unknown report kind `{kind}`, expected one of {sorted(REPORT_KINDS) + ['mse-hist']}")
    if kind != "ber" and metric not in SUMMARY_METRICS:
        raise ConfigurationError(f"Unknown metric `{metric}`, expected one of {SUMMARY_METRICS}")
    column = REPORT_KINDS[kind]

    rows = []
    for point in points:
        if not _matches(point.key, where or {}) or point.key.get(column, "") == "":
            continue
        x = float(point.key[column])
        if kind == "ber":
            if point.ber is not None:
                rows.append((x, point.ber, point.ber, point.ber))
            continue
        interval = point.summary.get(metric)
        if interval is not None:
            rows.append((x, interval.mean, interval.lo, interval.hi))
    return sorted(rows, key=lambda row: row[0])


def mse_histogram(score_rows: Iterable[Mapping[str, str]], bins: int = 50) -> List[Tuple]:
    """Binned MSE distribution of unjammed and jammed test images."""
    if bins < 1:
        raise ConfigurationError("bins must be >= 1")
    scores: Dict[str, List[float]] = {"Unjammed": [], "Jammed": []}
    for row in score_rows:
        if row.get("label") not in scores:
            raise FileFormatError(f"Unknown score label `{row.get('label')}`")
        scores[row["label"]].append(float(row["mse"]))

    everything = scores["Unjammed"] + scores["Jammed"]
    if not everything:
        return []
    edges = np.histogram_bin_edges(everything, bins=bins)
    unjammed, _ = np.histogram(scores["Unjammed"], bins=edges)
    jammed, _ = np.histogram(scores["Jammed"], bins=edges)
    return [
        (float(edges[index]), float(edges[index + 1]), int(unjammed[index]), int(jammed[index]))
        for index in range(len(edges) - 1)
    ]
