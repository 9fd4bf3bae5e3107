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

"""Some small utilities."""

import concurrent.futures
import logging
import threading
import time
from hashlib import md5

from progress.bar import Bar

import config
from src.errors import MLStableError

logger = logging.getLogger(__name__)


def coherent_hash(txt):
    """
    Create a hash from a string or bytestring.

    This hash is multiplatform and the always the same for multiple Py versions.
    """
    if isinstance(txt, str):
        txt = txt.encode('utf8')
    return int(md5(txt).hexdigest()[-6:], 16)


class TimingLogger:
    """Log only if more than N seconds passed after last log."""
    def __init__(self, secs_period, log_func):
        self._threshold = time.time() + secs_period
        self.log_func = log_func
        self.period = secs_period

    def log(self, *args, **kwargs):
        """Call log func with given args only if period exceeded."""
        if time.time() > self._threshold:
            self.log_func(*args, **kwargs)
            self._threshold = time.time() + self.period


class _StatusBoard:
    """Keep the progress of the pooled executions."""

    def __init__(self, func, total, known_errors):
        self.total = total
        self.ok = 0
        self.bad = 0
        self.init_time = time.time()
        self.func = func
        self.known_errors = known_errors
        self._lock = threading.Lock()
        self._bar = None
        if config.VERBOSE:
            self._bar = Bar('Running', max=total, suffix='%(index)d/%(max)d\r')

    def process(self, payload):
        """Run func on the payload; return (True, result) or (False, the exception)."""
        try:
            result = self.func(payload)
        except Exception as err:
            ok, result = False, err
            if isinstance(err, self.known_errors):
                # show the error type, and the error template filled lazily with its args
                template = "Known error {}: {}".format(err.__class__.__name__, err.args[0])
                logger.debug(template, *err.msg_args)
            else:
                logger.exception("Crashed while processing %r: %r", payload, err)
        else:
            ok = True

        with self._lock:
            if ok:
                self.ok += 1
            else:
                self.bad += 1
            if self._bar is not None:
                self._bar.next()
        return ok, result

    def finish(self):
        """Show final stats."""
        if self._bar is not None:
            self._bar.finish()
        logger.info("Pooled exec done! Total=%s  ok=%s  bad=%s  (%.1fs)",
                    self.total, self.ok, self.bad, time.time() - self.init_time)


def pooled_exec(func, payloads, pool_size, known_errors=(MLStableError,)):
    """Call func on each of the payloads, in a thread pool of indicated size.

    Return a list of (ok, result) pairs in the order of the payloads, where result is
    the raised exception when not ok. Known errors are logged in debug, other crashes
    are presented with their traceback.
    """
    payloads = list(payloads)
    board = _StatusBoard(func, len(payloads), tuple(known_errors))
    logger.debug('Starting pooled exec! total: %i, workers: %i', len(payloads), pool_size)
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, pool_size)) as executor:
        # map keeps the payloads order whatever the order of completion
        results = list(executor.map(board.process, payloads))
    board.finish()
    return results
