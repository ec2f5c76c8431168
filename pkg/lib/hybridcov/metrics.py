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

import logging

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import LAPACK
from .numerics import LowRankCovariance
from .numerics import eig_hermitian
from .numerics import hermitian

logger = logging.getLogger(__name__)


class RateReport(NamedTuple):
    se_est: float
    se_ideal: float
    loss_pct: float


@dataclass(frozen=True)
class MetricReport:
    eta: float
    rate_loss_pct: float
    se_ideal: float
    se_est: float


def _top_eigenvectors(r, count: int, method: str) -> np.ndarray:
    if isinstance(r, LowRankCovariance):
        return r.top_eigenvectors(count, method=method)
    _, v = eig_hermitian(r, method=method)
    return v[:, :count]


def _compress(r, u: np.ndarray) -> np.ndarray:
    if isinstance(r, LowRankCovariance):
        return r.compress(u)
    return hermitian(u.conj().T @ np.asarray(r, dtype=complex) @ u)


def _captured(r, u: np.ndarray) -> float:
    if isinstance(r, LowRankCovariance):
        return r.quadratic_trace(u)
    return float(np.real(np.trace(_compress(r, u))))


def efficiency_eta(r_hat, r_true, L: int, method: str = LAPACK) -> float:
    """Share of the true covariance energy captured by the estimated top-L eigenspace.

    eta = Tr(U_hat^H R U_hat) / Tr(U^H R U) with U_hat and U the top-L
    eigenvectors of ``r_hat`` and ``r_true``. Either argument may be dense or
    a ``LowRankCovariance``.
    """
    ideal = _captured(r_true, _top_eigenvectors(r_true, L, method))
    if ideal <= 0.0:
        return 0.0
    return _captured(r_true, _top_eigenvectors(r_hat, L, method)) / ideal


def spectral_efficiency(r_true, u: np.ndarray, snr_db, method: str = LAPACK, streams=None) -> float:
    """sum_s log2(1 + (snr/L_s) lambda_s(U^H R U)) for equal-power eigenbeamforming on U.

    The power is split over ``streams`` (default: the columns of U) even when U
    has fewer columns.
    """
    streams = u.shape[1] if streams is None else streams
    if u.shape[1] == 0 or streams < 1:
        return 0.0
    snr = 10.0 ** (float(snr_db) / 10.0)
    w, _ = eig_hermitian(_compress(r_true, u), method=method)
    return float(np.sum(np.log2(1.0 + (snr / streams) * np.maximum(w, 0.0))))


def rate_loss(r_hat, r_true, L_streams: int, snr_db, method: str = LAPACK) -> RateReport:
    """Spectral efficiency with the estimated versus the true dominant eigenvectors."""
    se_est = spectral_efficiency(r_true, _top_eigenvectors(r_hat, L_streams, method), snr_db, method, L_streams)
    se_ideal = spectral_efficiency(r_true, _top_eigenvectors(r_true, L_streams, method), snr_db, method, L_streams)
    loss = 0.0 if se_ideal <= 0.0 else (se_est - se_ideal) / se_ideal * 100.0
    return RateReport(se_est=se_est, se_ideal=se_ideal, loss_pct=loss)


def evaluate_estimate(r_hat, r_true, L: int, snr_db, method: str = LAPACK) -> MetricReport:
    rates = rate_loss(r_hat, r_true, L, snr_db, method)
    return MetricReport(
        eta=efficiency_eta(r_hat, r_true, L, method),
        rate_loss_pct=rates.loss_pct,
        se_ideal=rates.se_ideal,
        se_est=rates.se_est,
    )
