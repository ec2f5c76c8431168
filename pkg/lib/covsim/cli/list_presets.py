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

from covsim import configuration


def run(args):
    for name, preset in configuration.PRESETS.items():
        experiment = preset["experiment"] or "any"
        print(f"{name:8} {experiment:11} {preset['description']}")
        if args.verbose:
            for key, value in sorted(preset["scenario"].items()):
                print(f"{'':8}   {key} = {value}")
            if "algorithms" in preset:
                print(f"{'':8}   algorithms = {', '.join(preset['algorithms'])}")
            if "t_sweep" in preset:
                print(f"{'':8}   t_sweep = {preset['t_sweep']}")
            if "lo_values" in preset:
                print(f"{'':8}   lo_values = {preset['lo_values']}")
