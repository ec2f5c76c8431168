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

"""Combiner ensembles, tight-frame whitening and sensing operators.

A sensing stack holds one sensing matrix per frame and offers the few
operations the greedy estimators need: ``adjoint`` maps a batch of
measurement blocks back onto the dictionary atoms and ``columns`` returns
selected atoms as seen through every frame. ``DenseSensing`` stores the
matrices; ``KroneckerSensing`` keeps the MIMO operator Theta * (conj(A_T) kron A_R)
factored.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass
from typing import Union

import numpy as np

from scipy import linalg as sla
from scipy.stats import unitary_group

from .channel import Dictionary
from .channel import KroneckerDictionary
from .channel import ScenarioConfig
from .channel import build_dictionary
from .common import ProductKind
from .common import ScheduleMode
from .exceptions import ConfigurationError
from .exceptions import DimensionError
from .numerics import inv_sqrt_psd

logger = logging.getLogger(__name__)


def _matrix(a) -> np.ndarray:
    return a.dense() if isinstance(a, (Dictionary, KroneckerDictionary)) else np.asarray(a, dtype=complex)


def random_analog_combiner(M: int, N: int, rng, count=None) -> np.ndarray:
    """Unit-modulus combiner with iid uniform phases; ``count`` draws a stack."""
    if M > N:
        raise ConfigurationError(field="M", reason=f"RF chains ({M}) exceed antennas ({N})")
    shape = (M, N) if count is None else (count, M, N)
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=shape))


def whiten_to_tight_frame(w_rf, a) -> tuple[np.ndarray, np.ndarray]:
    """Return (W_bb, Phi) with W_bb = (W_rf W_rf^H)^(-1/2) and Phi = W_bb W_rf A.

    Works on a single combiner or a stack of them.
    """
    w_rf = np.asarray(w_rf, dtype=complex)
    w_bb = inv_sqrt_psd(w_rf @ np.conj(np.swapaxes(w_rf, -1, -2)))
    return w_bb, w_bb @ w_rf @ _matrix(a)


@dataclass(frozen=True)
class SensingEnsemble:
    """Per-frame combiners and sensing matrices, each with a leading frame axis."""

    w_rf: np.ndarray
    w_bb: np.ndarray
    phi: np.ndarray
    time_varying: bool

    @property
    def frames(self) -> int:
        return self.phi.shape[0]

    @property
    def combiners(self) -> np.ndarray:
        return self.w_bb @ self.w_rf

    def sensing(self) -> DenseSensing:
        return DenseSensing(self.phi)


def draw_ensemble(cfg: ScenarioConfig, rng, time_varying: bool = True, dictionary=None, frames=None) -> SensingEnsemble:
    """Draw a whitened ensemble; a fixed ensemble repeats the first frame."""
    dictionary = dictionary if dictionary is not None else build_dictionary(cfg.N, cfg.D)
    frames = cfg.T if frames is None else frames
    count = frames if time_varying else 1
    w_rf = random_analog_combiner(cfg.M, cfg.N, rng, count=count)
    w_bb, phi = whiten_to_tight_frame(w_rf, dictionary)
    if not time_varying:
        w_rf, w_bb, phi = (np.repeat(x, frames, axis=0) for x in (w_rf, w_bb, phi))
    return SensingEnsemble(w_rf=w_rf, w_bb=w_bb, phi=phi, time_varying=time_varying)


def baseband_rotated_ensemble(phi0, T: int, rng) -> np.ndarray:
    """Phi_t = U_t Phi_0 with Haar distributed unitary U_t, shape T x M x D."""
    phi0 = np.asarray(phi0, dtype=complex)
    m = phi0.shape[0]
    if m == 1:
        u = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(T, 1, 1)))
    else:
        u = unitary_group.rvs(m, size=T, random_state=rng).reshape(T, m, m)
    return u @ phi0


def frame_metrics(phi) -> tuple[float, float]:
    """Mutual coherence of the columns of Phi and the Welch bound for its shape."""
    phi = np.asarray(phi, dtype=complex)
    rows, cols = phi.shape
    if cols < 2:
        raise DimensionError(expected="at least 2 columns", got=phi.shape)
    norms = np.linalg.norm(phi, axis=0)
    unit = phi / np.where(norms > 0, norms, 1.0)
    gram = np.abs(unit.conj().T @ unit)
    np.fill_diagonal(gram, 0.0)
    coherence = float(min(np.max(gram), 1.0))
    welch = float(np.sqrt(max(cols - rows, 0) / (rows * (cols - 1))))
    return coherence, welch


def structured_product(kind, a, b, partitions: int = 1) -> np.ndarray:
    """Kronecker, Khatri-Rao or generalized Khatri-Rao product.

    The generalized product splits both operands into ``partitions`` column
    blocks and concatenates the blockwise Kronecker products.
    """
    kind = ProductKind(kind)
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    if kind == ProductKind.KRON:
        return np.kron(a, b)
    if kind == ProductKind.KHATRI_RAO:
        if a.shape[1] != b.shape[1]:
            raise DimensionError(expected="equal column counts", got=(a.shape, b.shape))
        return sla.khatri_rao(a, b)
    if partitions < 1 or a.shape[1] % partitions or b.shape[1] % partitions:
        raise DimensionError(expected=f"column counts divisible by {partitions}", got=(a.shape, b.shape))
    a_blocks = np.split(a, partitions, axis=1)
    b_blocks = np.split(b, partitions, axis=1)
    return np.hstack([np.kron(x, y) for x, y in zip(a_blocks, b_blocks)])


def aggregate_mimo_sensing(mode, precoders, combiners, a_t, a_r) -> tuple[np.ndarray, KroneckerDictionary]:
    """Aggregate operator of one training frame.

    ``precoders`` holds the f_{t,s} as rows (one row when the schedule shares
    the precoder) and ``combiners`` the W_{t,s} (one when shared). Returns
    Theta_agg and the factored dictionary conj(A_T) kron A_R.
    """
    mode = ScheduleMode(mode)
    f = np.atleast_2d(np.asarray(precoders, dtype=complex))
    w = np.asarray(combiners, dtype=complex)
    if w.ndim == 2:
        w = w[None]
    expected = {
        ScheduleMode.AVERAGED: (True, True),
        ScheduleMode.STACKED_COMBINERS: (True, False),
        ScheduleMode.STACKED_PRECODERS: (False, True),
        ScheduleMode.FULLY_VARYING: (False, False),
    }[mode]
    shared_f, shared_w = f.shape[0] == 1, w.shape[0] == 1
    if (expected[0] and not shared_f) or (expected[1] and not shared_w):
        raise ConfigurationError(field="mode", reason=f"schedule {mode.name} needs a shared precoder/combiner")
    if mode == ScheduleMode.FULLY_VARYING and f.shape[0] != w.shape[0]:
        raise ConfigurationError(field="mode", reason="precoder and combiner counts differ")

    if mode == ScheduleMode.AVERAGED:
        theta = np.kron(f[0][None, :], w[0])
    elif mode == ScheduleMode.STACKED_COMBINERS:
        theta = np.kron(f[0][None, :], np.vstack(w))
    elif mode == ScheduleMode.STACKED_PRECODERS:
        theta = np.kron(f, w[0])
    else:
        w_agg_t = np.hstack([x.T for x in w])
        theta = structured_product(ProductKind.GEN_KHATRI_RAO, f.T, w_agg_t, partitions=f.shape[0]).T
    a_t = a_t if isinstance(a_t, Dictionary) else Dictionary(np.asarray(a_t, dtype=complex), np.array([]))
    a_r = a_r if isinstance(a_r, Dictionary) else Dictionary(np.asarray(a_r, dtype=complex), np.array([]))
    return theta, KroneckerDictionary(tx=a_t, rx=a_r)


@dataclass(frozen=True)
class MimoEnsemble:
    """Per-frame training for a multi-antenna mobile station.

    ``precoders`` is T x S_f x N_T and ``combiners`` T x S_w x M_R x N_R, with
    S_f and S_w equal to 1 or M_T depending on the schedule. ``theta`` stacks
    the aggregate operators of every frame.
    """

    mode: ScheduleMode
    precoders: np.ndarray
    combiners: np.ndarray
    theta: np.ndarray
    dictionary: KroneckerDictionary
    symbols: int

    @property
    def frames(self) -> int:
        return self.theta.shape[0]

    def sensing(self) -> KroneckerSensing:
        return KroneckerSensing(self.theta, self.dictionary)


def draw_mimo_ensemble(cfg: ScenarioConfig, mode, rng, dictionary: KroneckerDictionary = None, frames=None) -> MimoEnsemble:
    """Draw precoders and whitened combiners for every frame of a schedule."""
    mode = ScheduleMode(mode)
    frames = cfg.T if frames is None else frames
    if dictionary is None:
        dictionary = KroneckerDictionary(tx=build_dictionary(cfg.N_T, cfg.D_T), rx=build_dictionary(cfg.N_R, cfg.D_R))
    n_f = cfg.M_T if mode in (ScheduleMode.STACKED_PRECODERS, ScheduleMode.FULLY_VARYING) else 1
    n_w = cfg.M_T if mode in (ScheduleMode.STACKED_COMBINERS, ScheduleMode.FULLY_VARYING) else 1
    precoders = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(frames, n_f, cfg.N_T))) / np.sqrt(cfg.N_T)
    w_rf = random_analog_combiner(cfg.M_R, cfg.N_R, rng, count=frames * n_w)
    w_bb = inv_sqrt_psd(w_rf @ np.conj(np.swapaxes(w_rf, -1, -2)))
    combiners = (w_bb @ w_rf).reshape(frames, n_w, cfg.M_R, cfg.N_R)
    theta = np.stack(
        [aggregate_mimo_sensing(mode, precoders[t], combiners[t], dictionary.tx, dictionary.rx)[0] for t in range(frames)]
    )
    return MimoEnsemble(
        mode=mode, precoders=precoders, combiners=combiners, theta=theta, dictionary=dictionary, symbols=cfg.M_T
    )


class DenseSensing:
    """Explicit sensing matrices, ``phi`` of shape frames x rows x atoms."""

    def __init__(self, phi):
        phi = np.asarray(phi, dtype=complex)
        if phi.ndim == 2:
            phi = phi[None]
        if phi.ndim != 3:
            raise DimensionError(expected="frames x rows x atoms", got=phi.shape)
        self.phi = phi

    @property
    def frames(self) -> int:
        return self.phi.shape[0]

    @property
    def rows(self) -> int:
        return self.phi.shape[1]

    @property
    def atoms(self) -> int:
        return self.phi.shape[2]

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        return np.conj(np.swapaxes(self.phi, 1, 2)) @ x

    def columns(self, idx) -> np.ndarray:
        return self.phi[:, :, np.asarray(idx, dtype=int)]

    def dense(self) -> np.ndarray:
        return self.phi

    def broadcast(self, frames: int) -> DenseSensing:
        if frames == self.frames:
            return self
        if self.frames != 1:
            raise DimensionError(expected=f"1 or {frames} frames", got=self.frames)
        return DenseSensing(np.broadcast_to(self.phi, (frames,) + self.phi.shape[1:]))

    def repeat(self, count: int) -> DenseSensing:
        return DenseSensing(np.repeat(self.phi, count, axis=0))

    def frame(self, t: int) -> DenseSensing:
        return DenseSensing(self.phi[t : t + 1])


class KroneckerSensing:
    """Theta_t (conj(A_T) kron A_R) per frame without forming the product.

    The adjoint applies Theta_t^H, unvectorizes to N_T x N_R blocks and
    multiplies by the two factor dictionaries.
    """

    def __init__(self, theta, dictionary: KroneckerDictionary):
        theta = np.asarray(theta, dtype=complex)
        if theta.ndim == 2:
            theta = theta[None]
        if theta.shape[2] != dictionary.antennas:
            raise DimensionError(expected=dictionary.antennas, got=theta.shape[2])
        self.theta = theta
        self.dictionary = dictionary

    @property
    def frames(self) -> int:
        return self.theta.shape[0]

    @property
    def rows(self) -> int:
        return self.theta.shape[1]

    @property
    def atoms(self) -> int:
        return self.dictionary.atoms

    def adjoint(self, x: np.ndarray) -> np.ndarray:
        frames, n = x.shape[0], x.shape[2]
        a_t, a_r = self.dictionary.tx.matrix, self.dictionary.rx.matrix
        u = (np.conj(np.swapaxes(self.theta, 1, 2)) @ x).reshape(frames, a_t.shape[0], a_r.shape[0], n)
        out = np.einsum("ia,tijk,jb->tabk", a_t, u, np.conj(a_r), optimize=True)
        return out.reshape(frames, self.atoms, n)

    def columns(self, idx) -> np.ndarray:
        return self.theta @ self.dictionary.columns(idx)

    def dense(self) -> np.ndarray:
        return self.theta @ self.dictionary.dense()

    def broadcast(self, frames: int) -> KroneckerSensing:
        if frames == self.frames:
            return self
        if self.frames != 1:
            raise DimensionError(expected=f"1 or {frames} frames", got=self.frames)
        return KroneckerSensing(np.broadcast_to(self.theta, (frames,) + self.theta.shape[1:]), self.dictionary)

    def repeat(self, count: int) -> KroneckerSensing:
        return KroneckerSensing(np.repeat(self.theta, count, axis=0), self.dictionary)

    def frame(self, t: int) -> KroneckerSensing:
        return KroneckerSensing(self.theta[t : t + 1], self.dictionary)


SensingStack = Union[DenseSensing, KroneckerSensing]


def as_sensing(phi) -> SensingStack:
    """Wrap a matrix, a stack of matrices or a list of matrices as a sensing stack."""
    if isinstance(phi, (DenseSensing, KroneckerSensing)):
        return phi
    if isinstance(phi, SensingEnsemble):
        return phi.sensing()
    if isinstance(phi, (list, tuple)):
        phi = np.stack([np.asarray(p, dtype=complex) for p in phi])
    return DenseSensing(phi)
