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

"""Coherence metrics, the closed-form recovery bound and Monte-Carlo protocols.

A metric below one is the exact condition for the next greedy selection to
land in the true support, given that the first L_o selections (the set S_o)
were correct. Monte-Carlo draws use on-grid supports with a D = N dictionary
unless ``D`` is given.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import build_dictionary
from .common import CoherenceKind
from .exceptions import ArgumentError
from .exceptions import ConfigurationError
from .exceptions import DegenerateBoundError
from .recovery import comp
from .recovery import dcomp
from .recovery import dsomp
from .recovery import omp
from .recovery import somp
from .sensing import random_analog_combiner
from .sensing import whiten_to_tight_frame

logger = logging.getLogger(__name__)

SUPPORT_ALGORITHMS = ("omp", "somp", "comp", "dsomp", "dcomp")


@dataclass(frozen=True)
class CoherenceParams:
    N: int = 64
    M: int = 8
    L: int = 8
    L_o: int = 0
    T: int = 1
    D: Optional[int] = None

    def __post_init__(self):
        if not (self.N >= self.M >= self.L > self.L_o >= 0):
            raise ConfigurationError(field="L_o", reason="need N >= M >= L > L_o >= 0")
        if self.T < 1:
            raise ConfigurationError(field="T", reason="must be a positive integer")
        if self.atoms < self.N:
            raise ConfigurationError(field="D", reason="dictionary smaller than the array")

    @property
    def atoms(self) -> int:
        return self.N if self.D is None else self.D


@dataclass(frozen=True)
class CoherenceSample:
    value: float
    kind: CoherenceKind
    params: CoherenceParams


@dataclass(frozen=True)
class CoherenceDraw:
    """One random instance: support, prior correct selections, ensemble and gains."""

    support: np.ndarray
    prior: np.ndarray
    phis: np.ndarray
    gains: np.ndarray
    params: CoherenceParams


@dataclass(frozen=True)
class CdfTable:
    """Empirical CDF: sorted samples and their cumulative probabilities."""

    values: np.ndarray
    probabilities: np.ndarray

    @property
    def trials(self) -> int:
        return len(self.values)

    def prob_below(self, x: float) -> float:
        return float(np.mean(self.values < x)) if self.trials else 0.0

    def mean(self) -> float:
        return float(np.mean(self.values))

    def std(self) -> float:
        return float(np.std(self.values, ddof=1)) if self.trials > 1 else 0.0


def empirical_cdf(values) -> CdfTable:
    values = np.sort(np.asarray(values, dtype=float))
    return CdfTable(values=values, probabilities=np.arange(1, len(values) + 1) / max(len(values), 1))


def _check_sets(support, prior, atoms: int):
    support = np.asarray(support, dtype=int)
    prior = np.asarray(prior, dtype=int)
    if len(set(support.tolist())) != len(support) or np.any(support < 0) or np.any(support >= atoms):
        raise ArgumentError(reason="support indices must be distinct atoms")
    if not set(prior.tolist()) <= set(support.tolist()):
        raise ArgumentError(reason="S_o is not a subset of S")
    if len(prior) >= len(support):
        raise ArgumentError(reason="S_o must be a proper subset of S")
    remaining = np.array([i for i in support if i not in set(prior.tolist())], dtype=int)
    return support, prior, remaining


def _frames(phis) -> np.ndarray:
    phis = np.asarray(phis, dtype=complex)
    return phis[None] if phis.ndim == 2 else phis


def _residual_sensing(phis: np.ndarray, prior: np.ndarray) -> np.ndarray:
    """Psi_t = (I - P_{t,S_o}) Phi_t."""
    if len(prior) == 0:
        return phis
    q, _ = np.linalg.qr(phis[:, :, prior])
    return phis - q @ (np.conj(np.swapaxes(q, 1, 2)) @ phis)


def _ratio(statistic: np.ndarray, support: np.ndarray, remaining: np.ndarray) -> float:
    outside = np.ones(statistic.shape[0], dtype=bool)
    outside[support] = False
    numerator = float(np.max(statistic[outside])) if np.any(outside) else 0.0
    denominator = float(np.max(statistic[remaining]))
    if denominator <= 0.0:
        return float("inf")
    return numerator / denominator


def rho_ds(support, prior, phis, gains) -> float:
    """Selection ratio of dynamic SOMP.

    Off-support maximum over on-support maximum of
    sum_t |psi_{t,j}^H sum_i psi_{t,i} g_{t,i}|^2. A single sensing matrix is
    reused for every column of ``gains``.
    """
    phis = _frames(phis)
    support, prior, remaining = _check_sets(support, prior, phis.shape[2])
    gains = np.asarray(gains, dtype=complex)
    gains = gains if gains.ndim == 2 else gains[:, None]
    psi = _residual_sensing(phis, prior)
    if psi.shape[0] == 1:
        z = psi[0][:, support] @ gains
        c = psi[0].conj().T @ z
        statistic = np.sum(np.abs(c) ** 2, axis=1)
    else:
        if psi.shape[0] != gains.shape[1]:
            raise ArgumentError(reason="one sensing matrix per gain column is required")
        z = np.einsum("tml,lt->tm", psi[:, :, support], gains)
        c = np.einsum("tmd,tm->td", np.conj(psi), z)
        statistic = np.sum(np.abs(c) ** 2, axis=0)
    return _ratio(statistic, support, remaining)


def rho_s_limit(support, prior, phi) -> float:
    """Large-T limit of the SOMP ratio for a fixed sensing matrix: max_j sum_i |psi_j^H psi_i|^2."""
    phis = _frames(phi)
    if phis.shape[0] != 1:
        raise ArgumentError(reason="a single sensing matrix is required")
    support, prior, remaining = _check_sets(support, prior, phis.shape[2])
    psi = _residual_sensing(phis, prior)[0]
    statistic = np.sum(np.abs(psi.conj().T @ psi[:, remaining]) ** 2, axis=1)
    return _ratio(statistic, support, remaining)


def rho_dc(support, prior, phis, gains) -> float:
    """Selection ratio of dynamic COMP with quadratic forms phi^H (x x^H - P x x^H P) phi, x = Phi_S g."""
    gains = np.asarray(gains, dtype=complex)
    gains = gains if gains.ndim == 2 else gains[:, None]
    phis = _frames(phis)
    support, prior, remaining = _check_sets(support, prior, phis.shape[2])
    phis = np.broadcast_to(phis, (gains.shape[1],) + phis.shape[1:])
    x = np.einsum("tml,lt->tm", phis[:, :, support], gains)
    statistic = np.sum(np.abs(np.einsum("tmd,tm->td", np.conj(phis), x)) ** 2, axis=0)
    if len(prior):
        q, _ = np.linalg.qr(phis[:, :, prior])
        px = np.einsum("tmk,tk->tm", q, np.einsum("tmk,tm->tk", np.conj(q), x))
        statistic = statistic - np.sum(np.abs(np.einsum("tmd,tm->td", np.conj(phis), px)) ** 2, axis=0)
    return _ratio(statistic, support, remaining)


def rho_ds_upper_bound(N: int, M: int, L: int, L_o: int) -> float:
    """Closed-form limit bound on the dynamic SOMP ratio for a tight-frame ensemble."""
    if N == M:
        raise DegenerateBoundError(N=N, M=M)
    if not (N > M >= L > L_o >= 0):
        raise ArgumentError(reason=f"need N > M >= L > L_o >= 0, got {(N, M, L, L_o)}")
    return 1.0 / (1.0 + (M - N + (M - L_o) * (N - L_o - 1)) / ((N - M) * (L - L_o)))


def draw_coherence_instance(params: CoherenceParams, rng, frames: Optional[int] = None, dictionary=None) -> CoherenceDraw:
    """Fresh support, uniform S_o within it, whitened time-varying ensemble and CN(0,1) gains."""
    frames = params.T if frames is None else frames
    dictionary = dictionary if dictionary is not None else build_dictionary(params.N, params.atoms)
    support = rng.choice(params.atoms, size=params.L, replace=False)
    prior = support[: params.L_o]
    _, phis = whiten_to_tight_frame(random_analog_combiner(params.M, params.N, rng, count=frames), dictionary)
    shape = (params.L, params.T)
    gains = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return CoherenceDraw(support=support, prior=prior, phis=phis, gains=gains, params=params)


def evaluate_coherence(kind, draw: CoherenceDraw) -> float:
    kind = CoherenceKind(kind)
    if kind == CoherenceKind.S:
        return rho_ds(draw.support, draw.prior, draw.phis[:1], draw.gains)
    if kind == CoherenceKind.S_LIMIT:
        return rho_s_limit(draw.support, draw.prior, draw.phis[0])
    if kind == CoherenceKind.DS:
        return rho_ds(draw.support, draw.prior, draw.phis, draw.gains)
    if kind == CoherenceKind.DC:
        return rho_dc(draw.support, draw.prior, draw.phis, draw.gains)
    p = draw.params
    return rho_ds_upper_bound(p.N, p.M, p.L, p.L_o)


def _frames_for(kind: CoherenceKind, params: CoherenceParams) -> int:
    return params.T if kind in (CoherenceKind.DS, CoherenceKind.DC) else 1


def coherence_sample(kind, params: CoherenceParams, rng) -> CoherenceSample:
    kind = CoherenceKind(kind)
    draw = draw_coherence_instance(params, rng, frames=_frames_for(kind, params))
    return CoherenceSample(value=evaluate_coherence(kind, draw), kind=kind, params=params)


def mc_cdf(kind, params: CoherenceParams, trials: int, rng) -> CdfTable:
    """Empirical CDF of a coherence metric over independent draws."""
    if trials < 1:
        raise ConfigurationError(field="trials", reason="must be at least 1")
    values = [coherence_sample(kind, params, rng).value for _ in range(trials)]
    return empirical_cdf(values)


def residual_gram_identities(phi, prior) -> tuple[float, float]:
    """Trace and squared Frobenius norm of Omega = Psi^H Psi over the atoms outside S_o.

    For a tight frame with constant D they equal D (M - L_o) and D^2 (M - L_o).
    """
    phis = _frames(phi)
    prior = np.asarray(prior, dtype=int)
    psi = _residual_sensing(phis, prior)[0]
    keep = np.setdiff1d(np.arange(psi.shape[1]), prior)
    omega = psi[:, keep].conj().T @ psi[:, keep]
    return float(np.real(np.trace(omega))), float(np.sum(np.abs(omega) ** 2))


def trace_gap(support, prior, phis) -> np.ndarray:
    """Per-frame Tr(Phi_r^H (Q_DC - Q_DS) Phi_r) with Phi_r = Phi_{S minus S_o}.

    Q_DS = (I - P) Phi_r Phi_r^H (I - P) and Q_DC = Phi_r Phi_r^H - P Phi_r Phi_r^H P,
    so the gap equals 2 Re Tr(Phi_r^H P Phi_r Phi_r^H (I - P) Phi_r), a trace
    of a product of two positive semidefinite matrices.
    """
    phis = _frames(phis)
    support, prior, remaining = _check_sets(support, prior, phis.shape[2])
    rows = phis.shape[1]
    out = []
    for phi in phis:
        p = np.zeros((rows, rows), dtype=complex)
        if len(prior):
            q, _ = np.linalg.qr(phi[:, prior])
            p = q @ q.conj().T
        x = phi[:, remaining] @ phi[:, remaining].conj().T
        eye = np.eye(rows)
        q_ds = (eye - p) @ x @ (eye - p)
        q_dc = x - p @ x @ p
        out.append(np.real(np.trace(phi[:, remaining].conj().T @ (q_dc - q_ds) @ phi[:, remaining])))
    return np.asarray(out)


@dataclass(frozen=True)
class RecoveryParams:
    N: int = 64
    M: int = 8
    L: int = 8
    T: int = 1
    D: Optional[int] = None

    @property
    def atoms(self) -> int:
        return self.N if self.D is None else self.D


def recover_support(algorithm: str, phis, ys, L: int) -> tuple:
    """Selection sequence of a greedy estimator on snapshots ``ys`` (one per row)."""
    if algorithm == "omp":
        return omp(phis[0], ys[0], L).support
    if algorithm == "somp":
        return somp(phis[0], ys.T, L).support
    if algorithm == "comp":
        return comp(phis[0], ys.T, L).support
    if algorithm == "dsomp":
        return dsomp(phis, ys, L).support
    if algorithm == "dcomp":
        return dcomp(phis, ys, L).support
    raise ConfigurationError(field="algorithm", reason=f"unknown algorithm {algorithm!r}")


def success_run_length(algorithm: str, params: RecoveryParams, rng, dictionary=None) -> int:
    """Number of leading selections inside the true support on one noiseless draw.

    Dynamic algorithms see a time-varying ensemble, the others a fixed one.
    """
    if algorithm not in SUPPORT_ALGORITHMS:
        raise ConfigurationError(field="algorithm", reason=f"unknown algorithm {algorithm!r}")
    dictionary = dictionary if dictionary is not None else build_dictionary(params.N, params.atoms)
    support = rng.choice(params.atoms, size=params.L, replace=False)
    count = params.T if algorithm in ("dsomp", "dcomp") else 1
    _, phis = whiten_to_tight_frame(random_analog_combiner(params.M, params.N, rng, count=count), dictionary)
    phis = np.broadcast_to(phis, (params.T,) + phis.shape[1:])
    shape = (params.L, params.T)
    gains = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    ys = np.einsum("tml,lt->tm", phis[:, :, support], gains)
    selected = recover_support(algorithm, phis, ys, params.L)
    truth = set(support.tolist())
    run = 0
    for index in selected:
        if index not in truth:
            break
        run += 1
    return run


def success_rates(run_lengths, L: int) -> np.ndarray:
    """Conditional success rate of each iteration given all earlier selections succeeded."""
    runs = np.asarray(run_lengths, dtype=int)
    rates = np.full(L, np.nan)
    for n in range(1, L + 1):
        reached = np.sum(runs >= n - 1)
        if reached:
            rates[n - 1] = np.sum(runs >= n) / reached
    return rates


def success_prob_per_iteration(algorithm: str, params: RecoveryParams, trials: int, rng) -> np.ndarray:
    if trials < 1:
        raise ConfigurationError(field="trials", reason="must be at least 1")
    dictionary = build_dictionary(params.N, params.atoms)
    runs = [success_run_length(algorithm, params, rng, dictionary) for _ in range(trials)]
    return success_rates(runs, params.L)


def support_recovery_rate(algorithm: str, params: RecoveryParams, trials: int, rng) -> float:
    """Fraction of noiseless draws whose full support is recovered."""
    dictionary = build_dictionary(params.N, params.atoms)
    runs = [success_run_length(algorithm, params, rng, dictionary) for _ in range(trials)]
    return float(np.mean(np.asarray(runs) == params.L))
