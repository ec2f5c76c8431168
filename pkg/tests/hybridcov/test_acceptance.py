"""Monte-Carlo checks of the recovery guarantees; run with ``pytest -m slow``."""

import numpy as np
import pytest

from hybridcov import analysis
from hybridcov import channel
from hybridcov import recovery
from hybridcov import sensing

pytestmark = pytest.mark.slow


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _samples(kind, params, trials, seed):
    rng = np.random.default_rng(seed)
    dictionary = channel.build_dictionary(params.N, params.atoms)
    frames = params.T if kind in ("rho_ds", "rho_dc") else 1
    return np.array(
        [
            analysis.evaluate_coherence(kind, analysis.draw_coherence_instance(params, rng, frames, dictionary))
            for _ in range(trials)
        ]
    )


@pytest.mark.parametrize("L_o", [0, 7])
def test_dsomp_ratio_approaches_bound(L_o):
    bound = analysis.rho_ds_upper_bound(64, 8, 8, L_o)
    long_run = _samples("rho_ds", analysis.CoherenceParams(N=64, M=8, L=8, L_o=L_o, T=1024), 500, 100 + L_o)
    short_run = _samples("rho_ds", analysis.CoherenceParams(N=64, M=8, L=8, L_o=L_o, T=4), 500, 200 + L_o)

    assert np.mean(long_run) <= bound + 0.02
    assert np.std(long_run, ddof=1) < np.std(short_run, ddof=1) / 3


def test_somp_saturates_where_dsomp_succeeds():
    limit = _samples("rho_s_limit", analysis.CoherenceParams(N=64, M=8, L=8, L_o=7, T=1), 500, 300)
    dynamic = _samples("rho_ds", analysis.CoherenceParams(N=64, M=8, L=8, L_o=7, T=1024), 500, 301)

    assert np.mean(limit < 1.0) < 0.9
    assert np.mean(dynamic < 1.0) >= 0.99


def test_dcomp_ratio_not_above_dsomp_ratio():
    params = analysis.CoherenceParams(N=64, M=8, L=8, L_o=7, T=1024)
    rng = np.random.default_rng(400)
    dictionary = channel.build_dictionary(64, 64)
    ds, dc = [], []
    for _ in range(200):
        draw = analysis.draw_coherence_instance(params, rng, dictionary=dictionary)
        ds.append(analysis.rho_ds(draw.support, draw.prior, draw.phis, draw.gains))
        dc.append(analysis.rho_dc(draw.support, draw.prior, draw.phis, draw.gains))
        assert np.all(analysis.trace_gap(draw.support, draw.prior, draw.phis) >= -1e-9)

    assert np.mean(dc) <= np.mean(ds) + 1e-3


def test_baseband_rotation_does_not_help_dsomp():
    rng = np.random.default_rng(500)
    dictionary = channel.build_dictionary(32, 32)
    for _ in range(100):
        phi0 = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(8, 32, rng), dictionary)[1]
        phis = sensing.baseband_rotated_ensemble(phi0, 8, rng)
        support = rng.choice(32, size=4, replace=False)
        gains = _gaussian(rng, (4, 8))
        ys = np.einsum("tml,lt->tm", phis[:, :, support], gains)

        assert recovery.dsomp(phis, ys, 4).support == recovery.somp(phi0, phi0[:, support] @ gains, 4).support


def test_reductions_on_many_instances():
    rng = np.random.default_rng(600)
    dictionary = channel.build_dictionary(32, 64)
    for _ in range(50):
        phi = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(8, 32, rng), dictionary)[1]
        phis = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(8, 32, rng, count=10), dictionary)[1]
        ys = _gaussian(rng, (10, 8))
        constant = np.broadcast_to(phi, phis.shape)

        assert recovery.somp(phi, ys[0], 6).support == recovery.omp(phi, ys[0], 6).support
        assert recovery.dsomp(constant, ys, 6).support == recovery.somp(phi, ys.T, 6).support
        a, b = recovery.dcomp(constant, ys, 6), recovery.comp(phi, ys.T, 6)
        assert a.support == b.support
        assert np.allclose(a.block, b.block, atol=1e-12 * np.max(np.abs(b.block)) * 100)
        a, b = recovery.wb_dcomp(phis, ys[:, :, None], 6), recovery.dcomp(phis, ys, 6)
        assert a.support == b.support
        assert np.allclose(a.block, b.block, atol=1e-12)
