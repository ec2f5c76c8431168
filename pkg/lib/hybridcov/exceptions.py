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

from .common import KwException

"""Exceptions that may be raised by this library."""


class ConfigurationError(KwException):
    """Raised when scenario or experiment parameters violate their invariants.
    Carries the offending ``field`` and a human readable ``reason``."""

    pass


class DimensionError(KwException):
    """Raised when operand shapes are incompatible."""

    pass


class ArgumentError(KwException):
    """Raised when index sets passed to an analysis routine are inconsistent."""

    pass


class SingularityError(KwException):
    """Raised when a selected column block is rank deficient.
    ``support_size`` names the number of selected columns."""

    pass


class DefinitenessError(KwException):
    """Raised when a matrix that must be positive definite is not.
    ``smallest_eigenvalue`` reports the offending value."""

    pass


class ConvergenceError(KwException):
    """Raised when the Jacobi eigensolver exhausts its rotation budget."""

    pass


class DegenerateBoundError(KwException):
    """Raised when the closed-form coherence bound is undefined (N = M)."""

    pass
