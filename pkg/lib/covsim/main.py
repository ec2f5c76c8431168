#!/usr/bin/env python3

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
import faulthandler
import logging
import signal
import sys

from covsim import NAME
from covsim import __version__
from covsim import cli
from covsim.custom_logger import CustomLogger

logging.setLoggerClass(CustomLogger)
logger = logging.getLogger(__name__)

_LOG_FORMAT = "%(asctime)s,%(msecs)03d %(levelname)8s [%(threadName)s] %(name)s: %(message)s"


def create_parser():
    prog = NAME.lower()
    arg_parser = argparse.ArgumentParser(prog=prog, epilog=f"Run `{prog} <action> --help` for the options of an action.")
    arg_parser.add_argument(
        "-d",
        "--debug",
        action="count",
        default=0,
        help="log progress to stderr; -dd adds per-trial messages",
    )
    arg_parser.add_argument("-V", "--version", action="version", version=f"%(prog)s {__version__}")
    arg_parser.add_argument("--help-actions", action="store_true", help="list the actions and their arguments")
    arg_parser.add_argument("action", nargs=argparse.REMAINDER, choices=cli.actions, help="action and its arguments")
    return arg_parser


def _setup_logging(debug: int):
    level = logging.ERROR - 10 * debug
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(_LOG_FORMAT))
    handler.setLevel(level if debug > 0 else logging.WARNING)
    root = logging.getLogger("")
    root.setLevel(min(level, logging.WARNING))
    root.addHandler(handler)


def _parse_arguments(argv=None):
    args = create_parser().parse_args(argv)
    if args.help_actions or not args.action:
        cli.print_help()
        return None
    _setup_logging(args.debug)
    logger.info("%s %s", NAME, __version__)
    return args


def _interrupted(signum, frame):
    # a second signal kills the process
    signal.signal(signal.SIGINT, signal.SIG_DFL)
    signal.signal(signal.SIGTERM, signal.SIG_DFL)
    if logger.isEnabledFor(logging.INFO):
        faulthandler.dump_traceback()
    sys.exit(f"{NAME}: interrupted by {signal.Signals(signum).name}")


def main(argv=None):
    args = _parse_arguments(argv)
    if args is None:
        return 0
    for signum in (signal.SIGINT, signal.SIGTERM):
        signal.signal(signum, _interrupted)
    return cli.run(args.action)


if __name__ == "__main__":
    sys.exit(main())
