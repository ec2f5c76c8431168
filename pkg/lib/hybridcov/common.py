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

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from enum import IntEnum


class KwException(Exception):
    """An exception that remembers all arguments passed to the constructor.
    They can be later accessed by simple member access.
    """

    def __init__(self, **kwargs):
        super().__init__(kwargs)

    def __getattr__(self, k):
        try:
            return super().__getattr__(k)
        except AttributeError:
            return self.args[0].get(k)

    def __str__(self):
        return ", ".join(f"{k}={v}" for k, v in self.args[0].items())


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the library and its tests."""

    pinv_identity: float = 1e-10
    projector: float = 1e-10
    inv_sqrt: float = 1e-9
    eig_orthonormal: float = 1e-9
    eig_residual: float = 1e-8
    condition_limit: float = 1e12
    definiteness: float = 1e-12
    dictionary_frame: float = 1e-9
    tight_frame: float = 1e-8
    column_dependence: float = 1e-12
    reduction: float = 1e-12
    psd_slack: float = 1e-9
    noiseless: float = 1e-12
    eta_slack: float = 1e-9


TOLERANCES = Tolerances()


class ScheduleMode(IntEnum):
    """Training schedules for a multi-antenna mobile station.

    AVERAGED repeats one precoder and one combiner and averages the symbols,
    STACKED_COMBINERS keeps one precoder and changes the combiner per symbol,
    STACKED_PRECODERS keeps one combiner and changes the precoder,
    FULLY_VARYING changes both.
    """

    AVERAGED = 1
    STACKED_COMBINERS = 2
    STACKED_PRECODERS = 3
    FULLY_VARYING = 4


class CoherenceKind(Enum):
    S_LIMIT = "rho_s_limit"
    S = "rho_s"
    DS = "rho_ds"
    DC = "rho_dc"
    DS_BOUND = "rho_ds_bound"


class ProductKind(Enum):
    KRON = "kron"
    KHATRI_RAO = "khatri_rao"
    GEN_KHATRI_RAO = "gen_khatri_rao"
