"""Unit tests for jamming_detector."""

from os import getenv

from jamming_detector.utils import is_truthy

# Long-running simulated acceptance scenarios, enabled with JAMDET_ACCEPTANCE=1.
RUN_ACCEPTANCE = is_truthy(getenv("JAMDET_ACCEPTANCE", "False"))
