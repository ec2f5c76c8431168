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

"""Noisy baseband measurements for the narrowband, MIMO and wideband models.

The training symbol has unit modulus and is absorbed into the gains. Noise is
added after combining: the whitened combiners satisfy W_t W_t^H = I, so the
combined noise is CN(0, sigma^2 I) exactly as when it enters at the antennas.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass

import numpy as np

from .channel import SparseChannelRealization
from .channel import noise_variance
from .common import ScheduleMode
from .exceptions import DimensionError
from .sensing import MimoEnsemble
from .sensing import SensingEnsemble

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementSet:
    """Measurements ``y`` of shape frames x rows x columns.

    Narrowband and MIMO sets have one column per frame; wideband sets have
    one column per subcarrier.
    """

    y: np.ndarray
    sigma2: float
    kind: str

    @property
    def frames(self) -> int:
        return self.y.shape[0]

    def snapshots(self) -> np.ndarray:
        """Narrowband measurements as the columns of a rows x frames matrix."""
        return self.y[:, :, 0].T


def _noise(shape, sigma2: float, rng) -> np.ndarray:
    w = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.sqrt(sigma2 / 2.0) * w


def _frame_operators(channel: SparseChannelRealization, ensemble: SensingEnsemble) -> np.ndarray:
    """Per-frame matrices that map path gains to measurements."""
    frames = channel.T
    if ensemble.frames not in (1, frames):
        raise DimensionError(expected=f"1 or {frames} frames", got=ensemble.frames)
    if channel.on_grid:
        ops = ensemble.phi[:, :, channel.support]
    else:
        ops = ensemble.combiners @ channel.paths
    return np.broadcast_to(ops, (frames,) + ops.shape[1:])


def simulate_narrowband(channel: SparseChannelRealization, ensemble: SensingEnsemble, snr_db, rng) -> MeasurementSet:
    """y_t = Phi_t g_t + w_t."""
    sigma2 = noise_variance(snr_db)
    ops = _frame_operators(channel, ensemble)
    y = ops @ channel.gains.T[:, :, None]
    if sigma2 > 0:
        y = y + _noise(y.shape, sigma2, rng)
    return MeasurementSet(y=y, sigma2=sigma2, kind="narrowband")


def simulate_wideband(channel: SparseChannelRealization, ensemble: SensingEnsemble, snr_db, rng) -> MeasurementSet:
    """y_{t,k} = Phi_t (g_t * c_k) + w_{t,k}; one sensing matrix per frame for all subcarriers."""
    if channel.taps is None:
        raise DimensionError(expected="wideband realization", got="no subcarrier taps")
    sigma2 = noise_variance(snr_db)
    ops = _frame_operators(channel, ensemble)
    x = channel.gains.T[:, :, None] * channel.taps[None, :, :]
    y = ops @ x
    if sigma2 > 0:
        y = y + _noise(y.shape, sigma2, rng)
    return MeasurementSet(y=y, sigma2=sigma2, kind="wideband")


def simulate_mimo(channel: SparseChannelRealization, ensemble: MimoEnsemble, snr_db, rng) -> MeasurementSet:
    """Aggregate measurement Theta_t vec(H_t) + noise for every frame.

    The averaged schedule divides the noise variance by the number of
    training symbols; the stacked schedules keep sigma^2 per entry.
    """
    sigma2 = noise_variance(snr_db)
    frames = channel.T
    if ensemble.frames not in (1, frames):
        raise DimensionError(expected=f"1 or {frames} frames", got=ensemble.frames)
    if channel.on_grid:
        basis = ensemble.dictionary.columns(channel.support)
    else:
        basis = channel.paths
    ops = np.broadcast_to(ensemble.theta @ basis, (frames, ensemble.theta.shape[1], channel.L))
    y = ops @ channel.gains.T[:, :, None]
    if ensemble.mode == ScheduleMode.AVERAGED:
        sigma2 = sigma2 / ensemble.symbols
    if sigma2 > 0:
        y = y + _noise(y.shape, sigma2, rng)
    return MeasurementSet(y=y, sigma2=sigma2, kind="mimo")
