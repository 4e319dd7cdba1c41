"""Allow `python -m jamming_detector`."""

import sys

from jamming_detector.commands import main

sys.exit(main())
