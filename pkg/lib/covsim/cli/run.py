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
import sys

from hybridcov.exceptions import ConfigurationError

from covsim import configuration
from covsim import experiments
from covsim.tasks import default_threads

logger = logging.getLogger(__name__)


def run(args):
    defaults = configuration.user_defaults()
    spec = configuration.load_config(args.config, defaults)
    spec = configuration.apply_overrides(spec, seed=args.seed, trials=args.trials, output=args.out)
    threads = args.threads if args.threads is not None else defaults.get("threads") or default_threads()
    if threads < 1:
        raise ConfigurationError(field="threads", reason="must be at least 1")

    logger.info(
        "running %s (%s): %d trials per point, seed %d, %d threads", spec.preset, spec.experiment, spec.trials, spec.seed, threads
    )
    table = experiments.run_experiment(spec, threads=threads)
    experiments.emit_csv(table, spec.output)
    if table.failed:
        sys.stderr.write(f"covsim: error: {spec.preset} stopped at {table.error}\n")
        return 2
    return 0
