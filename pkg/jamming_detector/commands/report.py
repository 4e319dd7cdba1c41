"""Definition of the `jamdet report` command."""

from pathlib import Path
from typing import Dict, Iterable, List

from jamming_detector.exceptions import ConfigurationError
from jamming_detector.summary import (
    HISTOGRAM_COLUMNS,
    PLOT_COLUMNS,
    REPORT_KINDS,
    EvaluationSummary,
    mse_histogram,
    plot_rows,
    read_csv,
    write_csv_stream,
)
from jamming_detector.utils import provenance

from .base import BaseCommand, output_stream, positive_int

MSE_HISTOGRAM = "mse-hist"


def find_files(paths: Iterable[str], file_name: str) -> List[Path]:
    """Input files, searching directories recursively for `file_name`."""
    result = []
    for item in paths:
        path = Path(item)
        if path.is_dir():
            result.extend(sorted(path.rglob(file_name)))
        else:
            result.append(path)
    return result


def parse_where(items: Iterable[str]) -> Dict[str, str]:
    """`key=value` filters."""
    where = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"Invalid filter `{item}`, expected key=value")
        where[key] = value
    return where


class Command(BaseCommand):
    """Implementation of the report command."""

    name = "report"
    help = "Emit plot-ready CSV data from evaluation outputs"

    def add_arguments(self, parser):
        """Add parser arguments to the report command."""
        parser.add_argument(
            "--in",
            nargs="*",
            default=[],
            dest="inputs",
            help="summary.csv files (scores.csv for mse-hist) or directories holding them.",
        )
        parser.add_argument("--kind", required=True, choices=[*sorted(REPORT_KINDS), MSE_HISTOGRAM])
        parser.add_argument("--metric", default="accuracy", help="Metric column for the mean and interval.")
        parser.add_argument("--where", action="append", default=[], help="Filter on a sweep column, key=value.")
        parser.add_argument("--bins", type=positive_int, default=50, help="Histogram bins for mse-hist.")
        parser.add_argument("--out", help="Output CSV file (default stdout).")

    def handle(self, **options):
        """Handle execution of the report command."""
        kind = options["kind"]
        header = provenance(kind=kind)

        if kind == MSE_HISTOGRAM:
            rows = []
            for path in find_files(options["inputs"], "scores.csv"):
                _, file_rows = read_csv(path)
                rows.extend(file_rows)
            columns, data = HISTOGRAM_COLUMNS, mse_histogram(rows, options["bins"])
        else:
            summary = EvaluationSummary()
            for path in find_files(options["inputs"], "summary.csv"):
                summary.load(path)
            header.update(
                {key: value for key, value in summary.provenance.items() if key in ("master_seed", "config_hash")}
            )
            metric = options["metric"] if kind != "ber" else "ber"
            header["metric"] = metric
            columns, data = PLOT_COLUMNS, plot_rows(
                summary.points, kind, options["metric"], parse_where(options["where"])
            )

        with output_stream(options.get("out")) as stream:
            write_csv_stream(stream, columns, data, header)
