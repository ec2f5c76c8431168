## Copyright (C) 2024  hybridcov contributors
##
## This program is free software; you can redistribute it and/or modify
## it under the terms of the GNU General Public License as published by
## the Free Software Foundation; either version 2 of the License, or
## (at your option) any later version.
##
## This program is distributed in the hope that it will be useful,
## but WITHOUT ANY WARRANTY; without even the implied warranty of
## MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
## GNU General Public License for more details.
##
## You should have received a copy of the GNU General Public License along
## with this program; if not, write to the Free Software Foundation, Inc.,
## 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.

import logging

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import psutil

from covsim.custom_logger import TrialLogger

logger = logging.getLogger(__name__)


def default_threads() -> int:
    return psutil.cpu_count(logical=False) or 1


def trial_rng(seed: int, index: int):
    """Random stream of one trial; the seed is combined with the trial index by XOR."""
    return np.random.default_rng(int(seed) ^ int(index))


class TrialRunner:
    """Evaluates independent trials on a thread pool.

    Each trial gets its own generator from ``trial_rng`` and results come back
    in trial order, so the output does not depend on the number of threads.
    """

    def __init__(self, threads=1, name="trial"):
        self.threads = max(int(threads or 1), 1)
        self.name = name

    def __call__(self, function, seed, trials, label=""):
        def task(index):
            trial_logger = TrialLogger(logger, {"experiment": label or self.name, "trial": index})
            trial_logger.debug("started")
            try:
                return function(index, trial_rng(seed, index))
            except Exception:
                trial_logger.exception("calling %s", getattr(function, "__name__", function))
                raise

        if self.threads == 1 or trials == 1:
            return [task(index) for index in range(trials)]
        with ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix=self.name) as pool:
            return list(pool.map(task, range(trials)))
