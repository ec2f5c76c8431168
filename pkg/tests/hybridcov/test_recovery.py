import itertools

import numpy as np
import pytest

from hybridcov import channel
from hybridcov import exceptions
from hybridcov import recovery
from hybridcov import sensing

TOLERANCE = 1e-10


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _frames(rng, count=None, N=16, M=4, D=32):
    w_rf = sensing.random_analog_combiner(M, N, rng, count=count)
    return sensing.whiten_to_tight_frame(w_rf, channel.build_dictionary(N, D))[1]


def test_omp_orthonormal():
    y = np.array([0.0, 3.0, 0.0, 1.0])

    result = recovery.omp(np.eye(4), y, 2)

    assert result.support == (1, 3)
    assert np.allclose(result.gains, [3.0, 1.0])
    assert result.residual_norms[0] == pytest.approx(np.sqrt(10.0))
    assert result.residual_norms[-1] == pytest.approx(0.0, abs=1e-12)


def test_omp_tie_goes_to_lowest_index():
    result = recovery.omp(np.eye(4), np.array([0.0, 1.0, 0.0, 1.0]), 1)

    assert result.support == (1,)


def test_omp_residual_norms_nonincreasing():
    rng = np.random.default_rng(0)
    phi = _frames(rng)

    result = recovery.omp(phi, _gaussian(rng, 4), 4)

    assert len(result.residual_norms) == 5
    assert all(b <= a + 1e-12 for a, b in zip(result.residual_norms, result.residual_norms[1:]))
    assert result.residual_norms[-1] == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("L", [0, 5])
def test_sparsity_limits(L):
    with pytest.raises(exceptions.ConfigurationError):
        recovery.omp(np.eye(4), np.ones(4), L)


def test_somp_recovers_shared_support():
    rng = np.random.default_rng(1)
    y = np.zeros((6, 5), dtype=complex)
    y[[2, 4]] = _gaussian(rng, (2, 5))

    result = recovery.somp(np.eye(6), y, 2)

    assert set(result.support) == {2, 4}
    assert result.gains.shape == (2, 5)


def test_somp_l1_norm():
    y = np.array([[3.0, 0.0], [2.0, 2.0], [0.0, 0.0]])

    assert recovery.somp(np.eye(3), y, 1).support == (0,)
    assert recovery.somp(np.eye(3), y, 1, norm=recovery.L1).support == (1,)


def test_dsomp_requires_one_frame_per_snapshot():
    rng = np.random.default_rng(2)

    with pytest.raises(exceptions.DimensionError):
        recovery.dsomp(_frames(rng, count=3), _gaussian(rng, (4, 4)), 2)


def test_comp_block_is_sample_covariance():
    rng = np.random.default_rng(3)
    y = np.zeros((5, 8), dtype=complex)
    y[[0, 3]] = _gaussian(rng, (2, 8))

    estimate = recovery.comp(np.eye(5), y, 2)

    order = list(estimate.support)
    assert set(order) == {0, 3}
    assert np.allclose(estimate.block, y[order] @ y[order].conj().T / 8)
    assert estimate.r_g.shape == (5, 5)


def test_comp_warns_on_few_snapshots(caplog):
    recovery.comp(np.eye(4), np.array([[1.0], [2.0], [0.0], [0.0]]), 2)

    assert "snapshots for sparsity" in caplog.text


def test_reductions():
    rng = np.random.default_rng(4)
    for _ in range(20):
        phi = _frames(rng)
        T = 6
        ys = _gaussian(rng, (T, 4))
        constant = np.broadcast_to(phi, (T,) + phi.shape)

        a, b = recovery.omp(phi, ys[0], 3), recovery.somp(phi, ys[0], 3)
        assert a.support == b.support
        assert np.allclose(a.gains, b.gains[:, 0], atol=TOLERANCE)

        a, b = recovery.somp(phi, ys.T, 3), recovery.dsomp(constant, ys, 3)
        assert a.support == b.support
        assert np.allclose(a.gains, b.gains, atol=TOLERANCE)

        a, b = recovery.comp(phi, ys.T, 3), recovery.dcomp(constant, ys, 3)
        assert a.support == b.support
        assert np.allclose(a.block, b.block, atol=TOLERANCE)

        phis = _frames(rng, count=T)
        a, b = recovery.dcomp(phis, ys, 3), recovery.wb_dcomp(phis, ys[:, :, None], 3)
        assert a.support == b.support
        assert np.allclose(a.block, b.block, atol=TOLERANCE)


def test_dcomp_noiseless_time_varying_recovery():
    rng = np.random.default_rng(5)
    N, M, L, T = 16, 4, 2, 400
    dictionary = channel.build_dictionary(N, N)
    phis = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(M, N, rng, count=T), dictionary)[1]
    support = rng.choice(N, size=L, replace=False)
    gains = _gaussian(rng, (L, T))
    ys = np.einsum("tml,lt->tm", phis[:, :, support], gains)

    estimate = recovery.dcomp(phis, ys, L, dictionary)

    assert set(estimate.support) == set(support.tolist())
    assert estimate.covariance.dim == N


def test_wb_dcomp_rejects_flat_input():
    with pytest.raises(exceptions.DimensionError):
        recovery.wb_dcomp(np.eye(3), np.ones((2, 3)), 1)


def test_reconstruct_covariance():
    dictionary = channel.build_dictionary(4, 8)
    gains = np.array([[1.0, 1.0j], [2.0, 0.0]])

    estimate = recovery.reconstruct_covariance(dictionary, [1, 6], gains=gains)

    block = gains @ gains.conj().T / 2
    assert np.allclose(estimate.block, block)
    a = dictionary.matrix[:, [1, 6]]
    assert np.allclose(estimate.r_h, a @ block @ a.conj().T)
    assert estimate.atoms == 8


def test_reconstruct_covariance_needs_data():
    with pytest.raises(exceptions.ConfigurationError):
        recovery.reconstruct_covariance(None, [0])


def test_smv_covariance_union_support():
    y = np.zeros((4, 3), dtype=complex)
    y[0] = [1.0, 2.0, 3.0]
    y[2] = [1.0, -1.0, 0.5]

    estimate = recovery.smv_covariance(np.eye(4), y, 2)

    assert estimate.support == (0, 2)
    assert np.allclose(estimate.block, y[[0, 2]] @ y[[0, 2]].conj().T / 3)


def test_diagonal_comp():
    rng = np.random.default_rng(6)
    y = np.zeros((5, 50), dtype=complex)
    y[[1, 3]] = _gaussian(rng, (2, 50))

    estimate = recovery.diagonal_comp(np.eye(5), y, 2)

    r = y @ y.conj().T / 50
    assert set(estimate.support) == {1, 3}
    for n, atom in enumerate(estimate.support):
        assert estimate.block[n, n] == pytest.approx(np.real(r[atom, atom]))
    assert estimate.block[0, 1] == 0


def test_covariance_residual_is_hermitian_but_not_psd():
    blocks = np.array([[[1.0], [1.0]]])

    v = recovery.covariance_residuals(np.eye(2), blocks, [0])[0]

    assert np.allclose(v, [[0.0, 1.0], [1.0, 1.0]])
    assert np.min(np.linalg.eigvalsh(v)) < 0
    assert np.real(np.trace(v)) > 0


@pytest.mark.parametrize("name", recovery.NARROWBAND_ESTIMATORS)
def test_estimate_covariance_names(name):
    rng = np.random.default_rng(7)
    dictionary = channel.build_dictionary(16, 32)
    phis = _frames(rng, count=5)
    ys = _gaussian(rng, (5, 4))

    estimate = recovery.estimate_covariance(name, phis, ys, 2, dictionary)

    assert estimate.atoms == 32
    assert estimate.covariance.dim == 16
    assert np.allclose(estimate.block, estimate.block.conj().T)


def test_estimate_covariance_unknown():
    with pytest.raises(exceptions.ConfigurationError):
        recovery.estimate_covariance("lasso", np.eye(3), np.ones((1, 3)), 1)


def test_stacked_direct_single_subcarrier():
    rng = np.random.default_rng(8)
    phis = _frames(rng, count=4)
    ys = _gaussian(rng, (4, 4, 1))

    direct = recovery.stacked_direct("dcomp", phis, ys, 2)
    reference = recovery.dcomp(phis, ys[:, :, 0], 2)

    assert direct.support == reference.support
    assert np.allclose(direct.block, reference.block)


def test_stacked_direct_repeats_frames():
    rng = np.random.default_rng(9)
    phis = _frames(rng, count=2)
    ys = _gaussian(rng, (2, 4, 3))

    direct = recovery.stacked_direct("dsomp", phis, ys, 2)
    snapshots = ys.transpose(0, 2, 1).reshape(6, 4)
    reference = recovery.dsomp(np.repeat(phis, 3, axis=0), snapshots, 2)

    assert direct.support == reference.support


def test_omp_exact_fit_matches_exhaustive_search():
    rng = np.random.default_rng(31)
    exact = 0
    for _ in range(50):
        phi = _gaussian(rng, (8, 16))
        support = rng.choice(16, size=2, replace=False)
        y = phi[:, support] @ _gaussian(rng, 2)

        result = recovery.omp(phi, y, 2)
        if result.residual_norms[-1] > 1e-8 * np.linalg.norm(y):
            continue
        exact += 1
        best = min(
            itertools.combinations(range(16), 2),
            key=lambda s: np.linalg.norm(y - phi[:, list(s)] @ np.linalg.lstsq(phi[:, list(s)], y, rcond=None)[0]),
        )
        assert set(result.support) == set(best) == set(support.tolist())
    assert exact >= 10


def test_comp_block_solves_covariance_least_squares():
    rng = np.random.default_rng(32)
    phi = _frames(rng, N=8, M=4, D=8)
    y = _gaussian(rng, (4, 10))

    estimate = recovery.comp(phi, y, 2)

    cols = phi[:, list(estimate.support)]
    r_y = y @ y.conj().T / 10
    solution = np.linalg.lstsq(np.kron(np.conj(cols), cols), r_y.reshape(-1, order="F"), rcond=None)[0]
    assert np.allclose(estimate.block, solution.reshape(2, 2, order="F"), atol=TOLERANCE)


def test_wb_dcomp_single_frame_is_comp():
    rng = np.random.default_rng(33)
    phi = _frames(rng)
    y = _gaussian(rng, (4, 12))

    a = recovery.comp(phi, y, 3)
    b = recovery.wb_dcomp(phi[None], y[None], 3)

    assert a.support == b.support
    assert np.allclose(a.block, b.block, atol=TOLERANCE)


def test_covariance_residual_trace_nonnegative_along_selection():
    rng = np.random.default_rng(34)
    phi = _frames(rng)
    phis = _frames(rng, count=6)
    ys = _gaussian(rng, (6, 4))

    for frames, blocks, estimate in (
        (phi, ys.T[None], recovery.comp(phi, ys.T, 3)),
        (phis, ys[:, :, None], recovery.dcomp(phis, ys, 3)),
    ):
        for n in range(len(estimate.support) + 1):
            for v in recovery.covariance_residuals(frames, blocks, estimate.support[:n]):
                assert np.allclose(v, v.conj().T)
                assert np.real(np.trace(v)) >= -1e-9
