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

"""covsim: Monte-Carlo experiments for hybrid array covariance estimation."""

import os
import pkgutil
import subprocess

NAME = "covsim"


def _describe():
    """Version from ``git describe`` in a source checkout, else from the packaged data files."""
    source = os.path.dirname(os.path.abspath(__file__))
    if os.path.isdir(os.path.join(source, "..", "..", ".git")):
        try:
            out = subprocess.check_output(["git", "describe", "--always"], cwd=source, stderr=subprocess.DEVNULL)
            return out.strip().decode()
        except (OSError, subprocess.CalledProcessError):
            pass
    for resource in ("commit", "version"):
        data = pkgutil.get_data(NAME, resource) if _has_resource(source, resource) else None
        if data:
            return data.strip().decode()
    return "unknown"


def _has_resource(source, resource):
    return os.path.isfile(os.path.join(source, resource))


__version__ = _describe()
