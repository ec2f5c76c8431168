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

"""Array manifolds, dictionaries and ground-truth sparse channels.

The array is a half-wavelength ULA parameterized directly by the spatial
frequency omega = pi*sin(phi). Dictionary grids are uniform in omega, which
makes A*A^H = D*I exact.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import Optional

import numpy as np

from scipy import linalg as sla

from .exceptions import ConfigurationError
from .numerics import LowRankCovariance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioConfig:
    """All experiment dimensions.

    The MIMO fields (``N_T`` ... ``D_R``) are only consulted by the MIMO
    routines; ``K`` and ``N_cp`` only when ``wideband`` is set.
    """

    N: int = 64
    M: int = 8
    D: int = 64
    L: int = 8
    T: int = 1
    snr_db: float = 10.0
    seed: int = 0
    on_grid: bool = True
    wideband: bool = False
    K: int = 1
    N_cp: int = 1
    N_T: Optional[int] = None
    M_T: Optional[int] = None
    D_T: Optional[int] = None
    N_R: Optional[int] = None
    M_R: Optional[int] = None
    D_R: Optional[int] = None

    def __post_init__(self):
        self.validate()

    @property
    def mimo(self) -> bool:
        return self.N_T is not None

    @property
    def sigma2(self) -> float:
        return noise_variance(self.snr_db)

    def validate(self):
        def check(ok, name, reason):
            if not ok:
                raise ConfigurationError(field=name, reason=reason)

        for name in ("N", "M", "D", "L", "T", "K", "N_cp"):
            value = getattr(self, name)
            check(isinstance(value, (int, np.integer)) and value >= 1, name, "must be a positive integer")
        check(self.N >= self.M, "M", f"RF chains ({self.M}) exceed antennas ({self.N})")
        check(self.M >= self.L, "L", f"paths ({self.L}) exceed RF chains ({self.M})")
        check(self.D >= self.N, "D", f"dictionary size ({self.D}) below antenna count ({self.N})")
        if self.mimo:
            for name in ("N_T", "M_T", "D_T", "N_R", "M_R", "D_R"):
                value = getattr(self, name)
                check(isinstance(value, (int, np.integer)) and value >= 1, name, "must be a positive integer")
            check(self.N_R >= self.M_R, "M_R", "receive RF chains exceed receive antennas")
            check(self.D_T >= self.N_T, "D_T", "transmit dictionary smaller than transmit array")
            check(self.D_R >= self.N_R, "D_R", "receive dictionary smaller than receive array")
            check(self.L <= self.D_T * self.D_R, "L", "more paths than dictionary atoms")


def noise_variance(snr_db) -> float:
    """sigma^2 = 10^(-snr/10); an infinite SNR gives a noiseless model."""
    if snr_db is None:
        return 0.0
    return float(10.0 ** (-float(snr_db) / 10.0))


def ula_response(omega: float, N: int) -> np.ndarray:
    """Array response exp(j*omega*n), n = 0..N-1."""
    if N < 1:
        raise ConfigurationError(field="N", reason="must be a positive integer")
    return np.exp(1j * omega * np.arange(N))


def manifold(omegas, N: int) -> np.ndarray:
    """Array responses for several spatial frequencies, one per column."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    return np.exp(1j * np.outer(np.arange(N), omegas))


@dataclass(frozen=True)
class Dictionary:
    matrix: np.ndarray
    grid: np.ndarray

    @property
    def antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def atoms(self) -> int:
        return self.matrix.shape[1]

    def columns(self, idx) -> np.ndarray:
        return self.matrix[:, np.asarray(idx, dtype=int)]

    def dense(self) -> np.ndarray:
        return self.matrix


@dataclass(frozen=True)
class KroneckerDictionary:
    """The aggregate dictionary conj(A_T) kron A_R, kept in factored form.

    Atom ``tx * D_R + rx`` pairs transmit grid point ``tx`` with receive grid
    point ``rx``.
    """

    tx: Dictionary
    rx: Dictionary

    @property
    def antennas(self) -> int:
        return self.tx.antennas * self.rx.antennas

    @property
    def atoms(self) -> int:
        return self.tx.atoms * self.rx.atoms

    def split(self, idx):
        idx = np.asarray(idx, dtype=int)
        return idx // self.rx.atoms, idx % self.rx.atoms

    def columns(self, idx) -> np.ndarray:
        tx, rx = self.split(idx)
        return sla.khatri_rao(np.conj(self.tx.matrix[:, tx]), self.rx.matrix[:, rx])

    def dense(self) -> np.ndarray:
        return np.kron(np.conj(self.tx.matrix), self.rx.matrix)


def build_dictionary(N: int, D: int) -> Dictionary:
    """Uniform spatial-frequency grid omega_d = 2*pi*d/D - pi, d = 0..D-1."""
    if N < 1 or D < N:
        raise ConfigurationError(field="D", reason=f"dictionary size {D} must be at least the antenna count {N}")
    grid = 2.0 * np.pi * np.arange(D) / D - np.pi
    return Dictionary(matrix=manifold(grid, N), grid=grid)


def build_mimo_dictionary(cfg: ScenarioConfig) -> KroneckerDictionary:
    return KroneckerDictionary(tx=build_dictionary(cfg.N_T, cfg.D_T), rx=build_dictionary(cfg.N_R, cfg.D_R))


@dataclass(frozen=True)
class SparseChannelRealization:
    """Ground truth for one trial.

    ``paths`` holds the array response of every path as a column; estimators
    never see it. ``support`` is None for off-grid draws.
    """

    gains: np.ndarray
    aoas: np.ndarray
    omegas: np.ndarray
    paths: np.ndarray
    support: Optional[np.ndarray] = None
    delays: Optional[np.ndarray] = None
    taps: Optional[np.ndarray] = None
    aods: Optional[np.ndarray] = None
    tx_omegas: Optional[np.ndarray] = None
    tx_paths: Optional[np.ndarray] = None
    rx_paths: Optional[np.ndarray] = None

    @property
    def on_grid(self) -> bool:
        return self.support is not None

    @property
    def L(self) -> int:
        return self.gains.shape[0]

    @property
    def T(self) -> int:
        return self.gains.shape[1]

    def path_powers(self) -> np.ndarray:
        """Per-path power averaged over subcarriers (1 for narrowband)."""
        if self.taps is None:
            return np.ones(self.L)
        return np.mean(np.abs(self.taps) ** 2, axis=1)

    def channel_vectors(self) -> np.ndarray:
        """h_t = sum_l g_{l,t} a_l as the columns of an N x T matrix (vec(H_t) for MIMO)."""
        return self.paths @ self.gains

    def channel_matrices(self) -> np.ndarray:
        """H_t = sum_l g_{l,t} a_R,l a_T,l^H, stacked as T x N_R x N_T."""
        if self.tx_paths is None:
            raise ConfigurationError(field="N_T", reason="not a MIMO realization")
        return np.einsum("rl,lt,xl->trx", self.rx_paths, self.gains, np.conj(self.tx_paths))

    def true_covariance(self) -> LowRankCovariance:
        """Ensemble covariance sum_l p_l a_l a_l^H of the channel vector."""
        return LowRankCovariance(basis=self.paths, core=np.diag(self.path_powers()).astype(complex))


def _complex_gaussian(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def subcarrier_taps(delays, N_cp: int, K: int) -> np.ndarray:
    """c_{l,k} = sum_{d<N_cp} sinc(d - tau_l) exp(-j*2*pi*k*d/K), an L x K matrix."""
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    if np.any(delays < 0) or np.any(delays >= N_cp):
        raise ConfigurationError(field="delays", reason=f"delays must lie in [0, {N_cp})")
    d = np.arange(N_cp)
    pulse = np.sinc(d[None, :] - delays[:, None])
    dft = np.exp(-2j * np.pi * np.outer(d, np.arange(K)) / K)
    return pulse @ dft


def draw_channel(cfg: ScenarioConfig, rng, dictionary: Optional[Dictionary] = None) -> SparseChannelRealization:
    """Draw a narrowband (or wideband) L-path channel for T snapshots."""
    if cfg.on_grid:
        dictionary = dictionary if dictionary is not None else build_dictionary(cfg.N, cfg.D)
        support = rng.choice(cfg.D, size=cfg.L, replace=False)
        omegas = dictionary.grid[support]
        aoas = np.arcsin(np.clip(omegas / np.pi, -1.0, 1.0))
        paths = dictionary.columns(support)
    else:
        support = None
        aoas = rng.uniform(-np.pi / 2, np.pi / 2, size=cfg.L)
        omegas = np.pi * np.sin(aoas)
        paths = manifold(omegas, cfg.N)
    gains = _complex_gaussian(rng, (cfg.L, cfg.T))
    delays = taps = None
    if cfg.wideband:
        delays = rng.uniform(0.0, cfg.N_cp, size=cfg.L)
        taps = subcarrier_taps(delays, cfg.N_cp, cfg.K)
    return SparseChannelRealization(
        gains=gains, aoas=aoas, omegas=omegas, paths=paths, support=support, delays=delays, taps=taps
    )


def draw_mimo_channel(cfg: ScenarioConfig, rng, dictionary: Optional[KroneckerDictionary] = None) -> SparseChannelRealization:
    """Draw an L-path MIMO channel H_t = A_R G_t A_T^H.

    On the grid the vectorized support index of a path is ``tx * D_R + rx``.
    """
    if not cfg.mimo:
        raise ConfigurationError(field="N_T", reason="MIMO dimensions are not set")
    if cfg.on_grid:
        dictionary = dictionary if dictionary is not None else build_mimo_dictionary(cfg)
        support = rng.choice(cfg.D_T * cfg.D_R, size=cfg.L, replace=False)
        tx, rx = dictionary.split(support)
        tx_omegas, omegas = dictionary.tx.grid[tx], dictionary.rx.grid[rx]
    else:
        support = None
        tx_omegas = np.pi * np.sin(rng.uniform(-np.pi / 2, np.pi / 2, size=cfg.L))
        omegas = np.pi * np.sin(rng.uniform(-np.pi / 2, np.pi / 2, size=cfg.L))
    tx_paths = manifold(tx_omegas, cfg.N_T)
    rx_paths = manifold(omegas, cfg.N_R)
    gains = _complex_gaussian(rng, (cfg.L, cfg.T))
    return SparseChannelRealization(
        gains=gains,
        aoas=np.arcsin(np.clip(omegas / np.pi, -1.0, 1.0)),
        omegas=omegas,
        paths=sla.khatri_rao(np.conj(tx_paths), rx_paths),
        support=support,
        aods=np.arcsin(np.clip(tx_omegas / np.pi, -1.0, 1.0)),
        tx_omegas=tx_omegas,
        tx_paths=tx_paths,
        rx_paths=rx_paths,
    )
