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

import argparse
import logging
import sys

from importlib import import_module
from traceback import extract_tb

import numpy as np

from hybridcov.common import KwException
from hybridcov.exceptions import ConfigurationError

from covsim import NAME

# Load the `run` action module now, so that the `run()` function defined below
# replaces the submodule attribute it binds on the package (instead of the
# lazy import_module() in run() shadowing the function on first use).
from covsim.cli import run as _run_action  # noqa: E402,F401,I001

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _create_parser():
    parser = argparse.ArgumentParser(
        prog=NAME.lower(),
        add_help=False,
        epilog=f"Run `{NAME.lower()} <action> --help` for the options of an action.",
    )
    subparsers = parser.add_subparsers(title="actions", help="command-line action to perform")

    sp = subparsers.add_parser(
        "run",
        help="run an experiment and write its results as CSV",
        epilog="The configuration is a JSON (or YAML) document; see docs/configuration.md.",
    )
    sp.add_argument("config", help="experiment configuration file")
    sp.add_argument("--seed", type=int, help="base random seed; trial i uses seed XOR i")
    sp.add_argument("--trials", type=int, help="number of Monte-Carlo trials per sweep point")
    sp.add_argument("--out", metavar="PATH", help="CSV output path; standard output if neither this nor 'output' is set")
    sp.add_argument("--threads", type=int, help="worker threads (results do not depend on this)")
    sp.set_defaults(action="run")

    sp = subparsers.add_parser("list-presets", help="list the built-in experiment presets")
    sp.add_argument("-v", "--verbose", action="store_true", help="also print each preset's scenario")
    sp.set_defaults(action="list_presets")

    sp = subparsers.add_parser("selftest", help="run the numerical invariant checks")
    sp.add_argument("--seed", type=int, default=7, help="random seed for the random draws")
    sp.add_argument("--draws", type=int, default=20, help="random instances per check")
    sp.set_defaults(action="selftest")

    sp = subparsers.add_parser("realize", help="dump one channel realization as JSON (debugging use)")
    sp.add_argument("config", help="experiment configuration file")
    sp.add_argument("--seed", type=int, help="random seed")
    sp.add_argument("-T", type=int, dest="frames", help="number of snapshots to draw")
    sp.set_defaults(action="realize")

    return parser, subparsers.choices


_cli_parser, actions = _create_parser()
print_help = _cli_parser.print_help


def run(cli_args=None):
    if cli_args:
        args = _cli_parser.parse_args(cli_args)
    else:
        args = _cli_parser.parse_args()
    if "action" not in args:
        _cli_parser.print_usage(sys.stderr)
        sys.stderr.write(f"{NAME.lower()}: error: too few arguments\n")
        return EXIT_CONFIG
    action = args.action

    try:
        m = import_module("." + action, package=__name__)
        return m.run(args) or EXIT_OK
    except ConfigurationError as e:
        sys.stderr.write(f"{NAME.lower()}: error: configuration: {e}\n")
        return EXIT_CONFIG
    except (KwException, np.linalg.LinAlgError, OSError) as e:
        logger.debug("action %s failed", action, exc_info=True)
        sys.stderr.write(f"{NAME.lower()}: error: {type(e).__name__}: {e}\n")
        return EXIT_RUNTIME
    except AssertionError:
        tb_last = extract_tb(sys.exc_info()[2])[-1]
        sys.stderr.write(f"{NAME.lower()}: assertion failed: {tb_last[0]} line {int(tb_last[1])}\n")
        return EXIT_RUNTIME
