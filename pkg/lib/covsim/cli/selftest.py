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

"""Numerical invariant checks that run without any configuration file."""

import logging

import numpy as np

from hybridcov import analysis
from hybridcov import numerics
from hybridcov import recovery
from hybridcov import sensing
from hybridcov.channel import build_dictionary
from hybridcov.common import TOLERANCES

logger = logging.getLogger(__name__)

_N, _M, _D, _L = 16, 4, 32, 3


def _whitened(rng, count=None):
    dictionary = build_dictionary(_N, _D)
    return sensing.whiten_to_tight_frame(sensing.random_analog_combiner(_M, _N, rng, count=count), dictionary)[1]


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def check_tight_frame(rng):
    phi = _whitened(rng)
    assert np.allclose(phi @ phi.conj().T, _D * np.eye(_M), atol=TOLERANCES.tight_frame * _D)


def check_welch_bound(rng):
    coherence, welch = sensing.frame_metrics(_whitened(rng))
    assert coherence >= welch - 1e-12


def check_residual_gram(rng):
    phi = _whitened(rng)
    prior = rng.choice(_D, size=_M - 1, replace=False)
    trace, fro2 = analysis.residual_gram_identities(phi, prior)
    remaining = _M - len(prior)
    assert abs(trace - _D * remaining) <= 1e-8 * _D
    assert abs(fro2 - _D**2 * remaining) <= 1e-8 * _D**2


def check_bound_values(rng):
    assert analysis.rho_ds_upper_bound(64, 8, 8, 0) == 0.5
    assert analysis.rho_ds_upper_bound(64, 8, 8, 7) == 1.0


def check_reductions(rng):
    phi = _whitened(rng)
    T = 5
    ys = _gaussian(rng, (T, _M))
    tol = TOLERANCES.reduction * 1e3

    a, b = recovery.omp(phi, ys[0], _L), recovery.somp(phi, ys[0][:, None], _L)
    assert a.support == b.support and np.allclose(a.gains, b.gains[:, 0], atol=tol)

    phis = np.broadcast_to(phi, (T,) + phi.shape)
    a, b = recovery.somp(phi, ys.T, _L), recovery.dsomp(phis, ys, _L)
    assert a.support == b.support and np.allclose(a.gains, b.gains, atol=tol)

    a, b = recovery.comp(phi, ys.T, _L), recovery.dcomp(phis, ys, _L)
    assert a.support == b.support and np.allclose(a.block, b.block, atol=tol)

    phis = _whitened(rng, count=T)
    a, b = recovery.dcomp(phis, ys, _L), recovery.wb_dcomp(phis, ys[:, :, None], _L)
    assert a.support == b.support and np.allclose(a.block, b.block, atol=tol)


def check_baseband_rotation(rng):
    phi0 = _whitened(rng)
    T = 6
    phis = sensing.baseband_rotated_ensemble(phi0, T, rng)
    support = rng.choice(_D, size=_L, replace=False)
    gains = _gaussian(rng, (_L, T))
    ys = np.einsum("tml,lt->tm", phis[:, :, support], gains)
    assert recovery.dsomp(phis, ys, _L).support == recovery.somp(phi0, phi0[:, support] @ gains, _L).support


def check_trace_gap(rng):
    phis = _whitened(rng, count=4)
    support = rng.choice(_D, size=_L, replace=False)
    gap = analysis.trace_gap(support, support[:1], phis)
    assert np.all(gap >= -1e-9)


def check_covariance_residual(rng):
    phis = _whitened(rng, count=3)
    blocks = _gaussian(rng, (3, _M, 2))
    support = rng.choice(_D, size=2, replace=False)
    v = recovery.covariance_residuals(phis, blocks, support)
    assert np.allclose(v, np.conj(np.swapaxes(v, 1, 2)), atol=1e-12)
    assert np.all(np.real(np.trace(v, axis1=1, axis2=2)) >= -1e-9)


def check_jacobi(rng):
    a = _gaussian(rng, (6, 6))
    h = a + a.conj().T
    w_lapack, _ = numerics.eig_hermitian(h)
    w_jacobi, v = numerics.eig_hermitian(h, method=numerics.JACOBI)
    assert np.allclose(w_lapack, w_jacobi, atol=1e-9)
    assert np.allclose(h @ v, v * w_jacobi, atol=TOLERANCES.eig_residual * np.linalg.norm(h))


def check_pseudoinverse(rng):
    m = _gaussian(rng, (8, 3))
    assert np.allclose(numerics.pseudoinverse(m) @ m, np.eye(3), atol=TOLERANCES.pinv_identity)


CHECKS = (
    check_tight_frame,
    check_welch_bound,
    check_residual_gram,
    check_bound_values,
    check_reductions,
    check_baseband_rotation,
    check_trace_gap,
    check_covariance_residual,
    check_jacobi,
    check_pseudoinverse,
)


def run(args):
    rng = np.random.default_rng(args.seed)
    failures = 0
    for check in CHECKS:
        name = check.__name__.removeprefix("check_")
        try:
            for _ in range(max(args.draws, 1)):
                check(rng)
        except AssertionError:
            logger.debug("%s failed", name, exc_info=True)
            failures += 1
            print(f"FAIL {name}")
        else:
            print(f"ok   {name}")
    if failures:
        print(f"{failures} of {len(CHECKS)} checks failed")
        return 2
    return 0
