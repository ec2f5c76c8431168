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

"""Dense complex-matrix kernels.

Matrices are ``numpy.ndarray`` objects of dtype ``complex128``. Functions never
modify their arguments.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass

import numpy as np

from scipy import linalg as sla

from .common import TOLERANCES
from .exceptions import ConvergenceError
from .exceptions import DefinitenessError
from .exceptions import DimensionError
from .exceptions import SingularityError

logger = logging.getLogger(__name__)

LAPACK = "lapack"
JACOBI = "jacobi"
_SLOW_SWEEPS = 12


def as_complex_matrix(x) -> np.ndarray:
    """Return ``x`` as a finite two-dimensional complex array."""
    m = np.asarray(x, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(expected="non-empty 2-d matrix", got=m.shape)
    if not np.all(np.isfinite(m)):
        raise DimensionError(expected="finite entries", got="NaN or Inf")
    return m


def hermitian(x) -> np.ndarray:
    """Symmetrize the trailing two axes: H <- (H + H*)/2."""
    h = np.asarray(x, dtype=complex)
    return 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))


def pseudoinverse(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse (M*M)^-1 M* of a full column rank matrix."""
    m = as_complex_matrix(m)
    cols = m.shape[1]
    condition = np.linalg.cond(m)
    if not np.isfinite(condition) or condition > TOLERANCES.condition_limit:
        raise SingularityError(support_size=cols, condition=float(condition))
    mh = m.conj().T
    try:
        factor = sla.cho_factor(mh @ m, lower=False, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise SingularityError(support_size=cols, condition=float(condition)) from e
    return sla.cho_solve(factor, mh, check_finite=False)


def projector(b) -> np.ndarray:
    """Orthogonal projector onto range(B)."""
    b = as_complex_matrix(b)
    return hermitian(b @ pseudoinverse(b))


def inv_sqrt_psd(h) -> np.ndarray:
    """Inverse square root of a positive definite matrix, or of a stack of them."""
    h = hermitian(h)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise DimensionError(expected="square matrices", got=h.shape)
    w, v = np.linalg.eigh(h)
    smallest, largest = w[..., 0], w[..., -1]
    bad = (largest <= 0) | (smallest <= TOLERANCES.definiteness * largest)
    if np.any(bad):
        raise DefinitenessError(smallest_eigenvalue=float(np.min(smallest)))
    s = (v * (1.0 / np.sqrt(w))[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return hermitian(s)


def eig_hermitian(h, method: str = LAPACK) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns real eigenvalues sorted descending and the matching orthonormal
    eigenvectors as columns. ``method`` selects LAPACK (``numpy.linalg.eigh``)
    or a cyclic complex Jacobi iteration.
    """
    h = hermitian(as_complex_matrix(h))
    if h.shape[0] != h.shape[1]:
        raise DimensionError(expected="square matrix", got=h.shape)
    if method == LAPACK:
        w, v = np.linalg.eigh(h)
    elif method == JACOBI:
        w, v = _jacobi(h)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def _jacobi(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(h, dtype=complex, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    threshold = 1e-14 * scale
    skip = threshold / n
    budget = 100 * n * n
    rotations = 0
    sweeps = 0
    while True:
        off = np.sqrt(max(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= threshold:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= skip:
                    continue
                if rotations >= budget:
                    raise ConvergenceError(rotations=rotations, off_norm=float(off))
                phase = np.conj(a[p, q] / r)
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * phase, c * phase]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
                rotations += 1
    if sweeps > _SLOW_SWEEPS:
        logger.warning("jacobi: dim %d needed %d sweeps", n, sweeps)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("jacobi: dim %d converged after %d sweeps, %d rotations", n, sweeps, rotations)
    return np.real(np.diag(a)).copy(), v


@dataclass(frozen=True)
class LowRankCovariance:
    """A Hermitian matrix B C B^H kept in factored form.

    ``basis`` is n x k and ``core`` a Hermitian k x k matrix. Covariances of
    vectorized MIMO channels are handled this way so that the n x n matrix
    never has to be formed.
    """

    basis: np.ndarray
    core: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def dense(self) -> np.ndarray:
        return hermitian(self.basis @ self.core @ self.basis.conj().T)

    def top_eigenvectors(self, count: int, method: str = LAPACK) -> np.ndarray:
        """Orthonormal eigenvectors of the ``count`` largest eigenvalues.

        Fewer columns are returned when the rank of the basis is lower.
        """
        if self.basis.shape[1] == 0:
            return np.zeros((self.dim, 0), dtype=complex)
        q, r = np.linalg.qr(self.basis)
        _, v = eig_hermitian(r @ self.core @ r.conj().T, method=method)
        return q @ v[:, :count]

    def quadratic_trace(self, u: np.ndarray) -> float:
        """Tr(U^H R U) without forming R."""
        c = u.conj().T @ self.basis
        return float(np.real(np.trace(c @ self.core @ c.conj().T)))

    def compress(self, u: np.ndarray) -> np.ndarray:
        """U^H R U."""
        c = u.conj().T @ self.basis
        return hermitian(c @ self.core @ c.conj().T)
