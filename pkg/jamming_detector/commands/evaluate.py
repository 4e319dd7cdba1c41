"""Definition of the `jamdet evaluate` command."""

from jamming_detector.base import logger
from jamming_detector.experiment import load_experiment, run_experiment

from .base import BaseCommand, positive_int


class Command(BaseCommand):
    """Implementation of the evaluate command."""

    name = "evaluate"
    help = "Run an experiment sweep: simulate, encode and cross-validate every point"

    def add_arguments(self, parser):
        """Add parser arguments to the evaluate command."""
        parser.add_argument("--config", required=True, help="TOML experiment configuration.")
        parser.add_argument("--out", help="Output directory, overrides the configuration's output_dir.")
        parser.add_argument("--workers", type=positive_int, help="Threads for encoding and folds.")

    def handle(self, **options):
        """Handle execution of the evaluate command."""
        config = load_experiment(options["config"])
        if options.get("workers"):
            evaluation = config.evaluation.copy(update={"workers": options["workers"]})
            config = config.copy(update={"evaluation": evaluation})

        summary = run_experiment(config, options.get("out"))
        failed = sum(1 for point in summary.points if point.error)
        logger.info("Evaluation finished", points=len(summary.points), failed=failed)
