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

"""Greedy support recovery and covariance reconstruction.

All estimators run the same selection loop over a stack of frames. Frame t
contributes the measurement block Y_t and the sensing matrix Phi_t; the
selected atoms are tracked as an orthonormal basis Q_t of Phi_{t,S} so that
the projector P_t = Q_t Q_t^H is updated by one column per iteration.

Two selection rules exist:

* residual (OMP, SOMP, DSOMP): j = argmax_i sum_t ||phi_{t,i}^H (I - P_t) Y_t||^2
* covariance (COMP, DCOMP, WB-DCOMP): j = argmax_i sum_t phi_{t,i}^H V_t phi_{t,i}
  with V_t = R_t - P_t R_t P_t and R_t = Y_t Y_t^H.

COMP is a single frame holding all snapshots scaled by 1/sqrt(T), DCOMP one
frame per snapshot and WB-DCOMP one frame per training frame holding its K
subcarrier vectors. Ties go to the lowest atom index.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import Optional

import numpy as np

from scipy import linalg as sla

from .common import TOLERANCES
from .exceptions import ConfigurationError
from .exceptions import DimensionError
from .exceptions import SingularityError
from .numerics import LowRankCovariance
from .numerics import hermitian
from .numerics import projector
from .numerics import pseudoinverse
from .sensing import as_sensing

logger = logging.getLogger(__name__)

RESIDUAL = "residual"
COVARIANCE = "covariance"

L2 = "l2"
L1 = "l1"

NARROWBAND_ESTIMATORS = ("omp", "somp", "comp", "dsomp", "dcomp", "diag_comp")


@dataclass(frozen=True)
class GreedyResult:
    """Support in selection order, least-squares gains and residual norms.

    ``residual_norms`` starts with the norm of the data and has one entry per
    iteration after that.
    """

    support: tuple
    gains: np.ndarray
    residual_norms: tuple


@dataclass(frozen=True)
class CovarianceEstimate:
    """Recovered support and the Hermitian block of R_g on it.

    ``covariance`` is R_h = A_S block A_S^H in factored form when a dictionary
    was supplied.
    """

    support: tuple
    block: np.ndarray
    atoms: int
    covariance: Optional[LowRankCovariance] = None
    gains: Optional[np.ndarray] = None
    residual_norms: tuple = ()

    @property
    def r_g(self) -> np.ndarray:
        r = np.zeros((self.atoms, self.atoms), dtype=complex)
        idx = np.asarray(self.support, dtype=int)
        r[np.ix_(idx, idx)] = self.block
        return r

    @property
    def r_h(self) -> Optional[np.ndarray]:
        return None if self.covariance is None else self.covariance.dense()


def _row_energy(c: np.ndarray, norm: str) -> np.ndarray:
    if norm == L2:
        return np.sum(np.real(c * np.conj(c)), axis=(0, 2))
    if norm == L1:
        return np.sum(np.abs(c), axis=(0, 2))
    raise ConfigurationError(field="norm", reason=f"unknown selection norm {norm!r}")


def _herm(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def _extend_basis(q: np.ndarray, col: np.ndarray, support_size: int) -> np.ndarray:
    v = col[:, :, None]
    for _ in range(2):
        v = v - q @ (_herm(q) @ v)
    size = np.linalg.norm(v, axis=1, keepdims=True)
    reference = np.linalg.norm(col, axis=1)[:, None, None]
    if np.any(size <= TOLERANCES.column_dependence * reference):
        raise SingularityError(support_size=support_size, condition=float("inf"))
    return np.concatenate([q, v / size], axis=2)


def _select(stack, blocks: np.ndarray, L: int, rule: str, norm: str = L2):
    frames, rows, _ = blocks.shape
    if L < 1 or L > rows:
        raise ConfigurationError(field="L", reason=f"sparsity {L} must lie in 1..{rows}")
    if L > stack.atoms:
        raise ConfigurationError(field="L", reason=f"sparsity {L} exceeds {stack.atoms} atoms")
    stack = stack.broadcast(frames)
    q = np.zeros((frames, rows, 0), dtype=complex)
    residual = blocks
    norms = [float(np.linalg.norm(blocks))]
    support = []
    if rule == COVARIANCE:
        energy = _row_energy(stack.adjoint(blocks), L2)
    for _ in range(L):
        if rule == RESIDUAL:
            statistic = _row_energy(stack.adjoint(residual), norm)
        else:
            statistic = energy - _row_energy(stack.adjoint(blocks - residual), L2)
        statistic[support] = -np.inf
        j = int(np.argmax(statistic))
        support.append(j)
        q = _extend_basis(q, stack.columns([j])[:, :, 0], len(support))
        residual = blocks - q @ (_herm(q) @ blocks)
        norms.append(float(np.linalg.norm(residual)))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("%s selection over %d frames: %s", rule, frames, support)
    return stack, support, norms


def _back_project(stack, blocks: np.ndarray, support) -> np.ndarray:
    """Phi_{t,S}^+ Y_t for every frame, stacked as frames x |S| x columns."""
    cols = stack.columns(support)
    return np.stack([pseudoinverse(cols[t]) @ blocks[t] for t in range(blocks.shape[0])])


def _dictionary_columns(dictionary, support) -> np.ndarray:
    if hasattr(dictionary, "columns"):
        return dictionary.columns(support)
    return np.asarray(dictionary, dtype=complex)[:, np.asarray(support, dtype=int)]


def _dictionary_atoms(dictionary, default: int) -> int:
    if dictionary is None:
        return default
    if hasattr(dictionary, "atoms"):
        return dictionary.atoms
    return np.asarray(dictionary).shape[1]


def _single_frame(phi):
    stack = as_sensing(phi)
    if stack.frames != 1:
        raise DimensionError(expected="a single sensing matrix", got=f"{stack.frames} frames")
    return stack


def _snapshots(ys) -> np.ndarray:
    ys = np.asarray(ys, dtype=complex)
    if ys.ndim == 1:
        ys = ys[None, :]
    if ys.ndim != 2:
        raise DimensionError(expected="snapshots x rows", got=ys.shape)
    return ys


def omp(phi, y, L: int) -> GreedyResult:
    """Orthogonal matching pursuit for a single measurement vector."""
    stack = _single_frame(phi)
    blocks = np.asarray(y, dtype=complex).reshape(1, -1, 1)
    stack, support, norms = _select(stack, blocks, L, RESIDUAL)
    gains = _back_project(stack, blocks, support)[0, :, 0]
    return GreedyResult(support=tuple(support), gains=gains, residual_norms=tuple(norms))


def somp(phi, y, L: int, norm: str = L2) -> GreedyResult:
    """Simultaneous OMP; ``y`` holds the snapshots as columns."""
    stack = _single_frame(phi)
    y = np.asarray(y, dtype=complex)
    blocks = (y if y.ndim == 2 else y[:, None])[None]
    stack, support, norms = _select(stack, blocks, L, RESIDUAL, norm)
    gains = _back_project(stack, blocks, support)[0]
    return GreedyResult(support=tuple(support), gains=gains, residual_norms=tuple(norms))


def dsomp(phis, ys, L: int, norm: str = L2) -> GreedyResult:
    """Dynamic SOMP: one sensing matrix per snapshot, ``ys`` one snapshot per row."""
    ys = _snapshots(ys)
    blocks = ys[:, :, None]
    stack, support, norms = _select(as_sensing(phis), blocks, L, RESIDUAL, norm)
    gains = _back_project(stack, blocks, support)[:, :, 0].T
    return GreedyResult(support=tuple(support), gains=gains, residual_norms=tuple(norms))


def _covariance_estimate(stack, blocks, L, dictionary) -> CovarianceEstimate:
    stack, support, norms = _select(stack, blocks, L, COVARIANCE)
    b = _back_project(stack, blocks, support)
    block = hermitian(np.einsum("tkn,tln->kl", b, np.conj(b)))
    return reconstruct_covariance(
        dictionary, support, block=block, atoms=_dictionary_atoms(dictionary, stack.atoms), residual_norms=norms
    )


def comp(phi, y, L: int, dictionary=None) -> CovarianceEstimate:
    """Covariance OMP on the sample covariance (1/T) Y Y^H; snapshots are columns of ``y``."""
    stack = _single_frame(phi)
    y = np.asarray(y, dtype=complex)
    y = y if y.ndim == 2 else y[:, None]
    if y.shape[1] < L:
        logger.warning("comp: %d snapshots for sparsity %d, the covariance block may be ill-posed", y.shape[1], L)
    return _covariance_estimate(stack, y[None] / np.sqrt(y.shape[1]), L, dictionary)


def dcomp(phis, ys, L: int, dictionary=None) -> CovarianceEstimate:
    """Dynamic COMP: per-snapshot covariances y_t y_t^H with their own sensing matrices."""
    ys = _snapshots(ys)
    return _covariance_estimate(as_sensing(phis), ys[:, :, None] / np.sqrt(ys.shape[0]), L, dictionary)


def wb_dcomp(phis, ys, L: int, dictionary=None) -> CovarianceEstimate:
    """Wideband DCOMP; ``ys`` is frames x rows x subcarriers.

    Subcarriers of a frame share its sensing matrix and are averaged into one
    covariance per frame; frames are combined as in DCOMP.
    """
    ys = np.asarray(ys, dtype=complex)
    if ys.ndim != 3:
        raise DimensionError(expected="frames x rows x subcarriers", got=ys.shape)
    frames, _, k = ys.shape
    return _covariance_estimate(as_sensing(phis), ys / np.sqrt(k * frames), L, dictionary)


def reconstruct_covariance(
    dictionary, support, gains=None, block=None, atoms=None, residual_norms=()
) -> CovarianceEstimate:
    """Build R_g on the support and R_h = A_S R_g A_S^H.

    ``gains`` (|S| x T) give R_g = (1/T) G G^H; otherwise ``block`` is used.
    """
    support = tuple(int(i) for i in support)
    if block is None:
        if gains is None:
            raise ConfigurationError(field="gains", reason="either gains or a covariance block is required")
        gains = np.asarray(gains, dtype=complex)
        gains = gains if gains.ndim == 2 else gains[:, None]
        block = gains @ gains.conj().T / gains.shape[1]
    block = hermitian(np.atleast_2d(block))
    if block.shape != (len(support), len(support)):
        raise DimensionError(expected=(len(support), len(support)), got=block.shape)
    covariance = None
    if dictionary is not None:
        covariance = LowRankCovariance(basis=_dictionary_columns(dictionary, support), core=block)
    if atoms is None:
        atoms = _dictionary_atoms(dictionary, max(support, default=-1) + 1)
    return CovarianceEstimate(
        support=support,
        block=block,
        atoms=atoms,
        covariance=covariance,
        gains=gains,
        residual_norms=tuple(residual_norms),
    )


def smv_covariance(phi, y, L: int, dictionary=None) -> CovarianceEstimate:
    """Run OMP on every snapshot (columns of ``y``) and average the outer products."""
    y = np.asarray(y, dtype=complex)
    y = y if y.ndim == 2 else y[:, None]
    results = [omp(phi, y[:, t], L) for t in range(y.shape[1])]
    union = sorted({i for r in results for i in r.support})
    position = {atom: n for n, atom in enumerate(union)}
    gains = np.zeros((len(union), y.shape[1]), dtype=complex)
    for t, r in enumerate(results):
        gains[[position[i] for i in r.support], t] = r.gains
    return reconstruct_covariance(dictionary, union, gains=gains, atoms=_dictionary_atoms(dictionary, _single_frame(phi).atoms))


def diagonal_comp(phi, y, L: int, dictionary=None) -> CovarianceEstimate:
    """Covariance matching with a diagonal R_g.

    vec(R_y) is approximated by (conj(Phi) khatri-rao Phi) diag(R_g) and the
    diagonal is recovered with OMP; off-diagonal terms are ignored.
    """
    phi = _single_frame(phi).dense()[0]
    y = np.asarray(y, dtype=complex)
    y = y if y.ndim == 2 else y[:, None]
    r_y = y @ y.conj().T / y.shape[1]
    operator = sla.khatri_rao(np.conj(phi), phi)
    result = omp(operator, r_y.reshape(-1, order="F"), L)
    powers = np.maximum(np.real(result.gains), 0.0)
    return reconstruct_covariance(
        dictionary,
        result.support,
        block=np.diag(powers).astype(complex),
        atoms=_dictionary_atoms(dictionary, phi.shape[1]),
        residual_norms=result.residual_norms,
    )


def covariance_residuals(phis, blocks, support) -> np.ndarray:
    """Residual matrices V_t = R_t - P_t R_t P_t for a given support.

    ``blocks`` is frames x rows x columns with R_t = Y_t Y_t^H.
    """
    blocks = np.asarray(blocks, dtype=complex)
    stack = as_sensing(phis).broadcast(blocks.shape[0])
    cols = stack.columns(list(support))
    out = []
    for t in range(blocks.shape[0]):
        r = blocks[t] @ blocks[t].conj().T
        if len(support):
            p = projector(cols[t])
            r = r - p @ r @ p
        out.append(hermitian(r))
    return np.stack(out)


def estimate_covariance(name: str, phis, ys, L: int, dictionary=None) -> CovarianceEstimate:
    """Covariance estimate from narrowband snapshots (one per row of ``ys``).

    ``omp``, ``somp``, ``comp`` and ``diag_comp`` use the first sensing matrix
    for every snapshot; ``dsomp`` and ``dcomp`` use one per snapshot.
    """
    stack = as_sensing(phis)
    ys = _snapshots(ys)
    atoms = _dictionary_atoms(dictionary, stack.atoms)
    if name == "omp":
        return smv_covariance(stack.frame(0), ys.T, L, dictionary)
    if name == "somp":
        r = somp(stack.frame(0), ys.T, L)
        return reconstruct_covariance(dictionary, r.support, gains=r.gains, atoms=atoms, residual_norms=r.residual_norms)
    if name == "dsomp":
        r = dsomp(stack, ys, L)
        return reconstruct_covariance(dictionary, r.support, gains=r.gains, atoms=atoms, residual_norms=r.residual_norms)
    if name == "comp":
        return comp(stack.frame(0), ys.T, L, dictionary)
    if name == "dcomp":
        return dcomp(stack, ys, L, dictionary)
    if name == "diag_comp":
        return diagonal_comp(stack.frame(0), ys.T, L, dictionary)
    raise ConfigurationError(field="algorithms", reason=f"unknown estimator {name!r}")


def stacked_direct(name: str, phis, ys, L: int, dictionary=None) -> CovarianceEstimate:
    """Apply a narrowband estimator to wideband data.

    Every (frame, subcarrier) pair becomes one snapshot and frame t's sensing
    matrix is repeated for its K subcarriers.
    """
    ys = np.asarray(ys, dtype=complex)
    frames, rows, k = ys.shape
    stack = as_sensing(phis).broadcast(frames).repeat(k)
    return estimate_covariance(name, stack, ys.transpose(0, 2, 1).reshape(frames * k, rows), L, dictionary)
