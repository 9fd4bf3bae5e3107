#!/usr/bin/env python3

# Copyright 2024-2026 MLStable developers (see AUTHORS.txt)
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License version 3, as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along
# with this program.  If not, see <http://www.gnu.org/licenses/>.
#
# For further info, check README.md

"""Evaluate, sample and check Mittag-Leffler functions and stable first passages.

Examples:

    ./mlstable.py eval --fn D --alpha 1.5 --x 1.0
    ./mlstable.py table --name T1 --alpha 1.5 --grid 0.1:100:50:log --format json
    ./mlstable.py check --suite deterministic --alpha 1.2 --alpha 1.5
"""

import logging
import sys
from logging.handlers import RotatingFileHandler

from src import cli


class CustomRotatingFH(RotatingFileHandler):
    """Rotating handler that starts a new file for every run."""

    def __init__(self, *args, **kwargs):
        RotatingFileHandler.__init__(self, *args, **kwargs)
        self.doRollover()


# set up logging; stdout is reserved for the data
logger = logging.getLogger()
logger.setLevel(logging.DEBUG)
formatter = logging.Formatter("%(asctime)s  %(name)-20s %(levelname)-8s %(message)s")

stderr_handler = logging.StreamHandler(sys.stderr)
stderr_handler.setLevel(logging.INFO)
stderr_handler.setFormatter(formatter)
logger.addHandler(stderr_handler)

logger = logging.getLogger("mlstable")


def configure_logging(options):
    """Apply the logging flags once the command line is parsed."""
    if options.verbose:
        stderr_handler.setLevel(logging.DEBUG)
    if options.log_file:
        handler = CustomRotatingFH(options.log_file, backupCount=5)
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(formatter)
        logging.getLogger().addHandler(handler)


if __name__ == "__main__":
    sys.exit(cli.dispatch(sys.argv[1:], configure_logging=configure_logging))
