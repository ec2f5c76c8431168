import numpy as np
import pytest

from hybridcov import channel
from hybridcov import exceptions
from hybridcov import sensing
from hybridcov.common import TOLERANCES
from hybridcov.common import ProductKind
from hybridcov.common import ScheduleMode


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_random_analog_combiner_unit_modulus(rng):
    w = sensing.random_analog_combiner(4, 16, rng, count=3)

    assert w.shape == (3, 4, 16)
    assert np.allclose(np.abs(w), 1.0)


def test_random_analog_combiner_too_many_chains(rng):
    with pytest.raises(exceptions.ConfigurationError):
        sensing.random_analog_combiner(17, 16, rng)


@pytest.mark.parametrize("N, M, D", [(16, 4, 16), (16, 4, 64), (8, 8, 8)])
def test_whitening_gives_tight_frame(rng, N, M, D):
    dictionary = channel.build_dictionary(N, D)
    w_rf = sensing.random_analog_combiner(M, N, rng)

    w_bb, phi = sensing.whiten_to_tight_frame(w_rf, dictionary)
    w = w_bb @ w_rf

    assert np.allclose(w @ w.conj().T, np.eye(M), atol=TOLERANCES.tight_frame)
    assert np.allclose(phi @ phi.conj().T, D * np.eye(M), atol=TOLERANCES.tight_frame * D)


def test_draw_ensemble_fixed_repeats(rng):
    cfg = channel.ScenarioConfig(N=16, M=4, D=32, L=2, T=5)

    ensemble = sensing.draw_ensemble(cfg, rng, time_varying=False)

    assert ensemble.frames == 5
    assert all(np.array_equal(ensemble.phi[0], ensemble.phi[t]) for t in range(5))


def test_draw_ensemble_time_varying(rng):
    cfg = channel.ScenarioConfig(N=16, M=4, D=32, L=2, T=3)

    ensemble = sensing.draw_ensemble(cfg, rng)

    assert ensemble.phi.shape == (3, 4, 32)
    assert not np.allclose(ensemble.phi[0], ensemble.phi[1])


def test_baseband_rotated_ensemble(rng):
    phi0 = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(4, 8, rng), channel.build_dictionary(8, 8))[1]

    phis = sensing.baseband_rotated_ensemble(phi0, 3, rng)

    assert phis.shape == (3, 4, 8)
    for phi in phis:
        assert np.allclose(phi.conj().T @ phi, phi0.conj().T @ phi0)


def test_frame_metrics_welch(rng):
    phi = sensing.whiten_to_tight_frame(sensing.random_analog_combiner(4, 16, rng), channel.build_dictionary(16, 32))[1]

    coherence, welch = sensing.frame_metrics(phi)

    assert np.isclose(welch, np.sqrt(28 / (4 * 31)))
    assert welch - 1e-12 <= coherence <= 1.0


def test_frame_metrics_orthonormal_basis():
    coherence, welch = sensing.frame_metrics(np.eye(3))

    assert coherence == 0.0
    assert welch == 0.0


def test_structured_products(rng):
    a = rng.standard_normal((2, 4))
    b = rng.standard_normal((3, 4))

    assert sensing.structured_product(ProductKind.KRON, a, b).shape == (6, 16)
    kr = sensing.structured_product("khatri_rao", a, b)
    assert np.allclose(kr[:, 1], np.kron(a[:, 1], b[:, 1]))
    g = sensing.structured_product(ProductKind.GEN_KHATRI_RAO, a, b, partitions=2)
    assert np.allclose(g[:, :4], np.kron(a[:, :2], b[:, :2]))
    assert np.allclose(sensing.structured_product(ProductKind.GEN_KHATRI_RAO, a, b, partitions=4), kr)


def test_structured_product_bad_partitions(rng):
    with pytest.raises(exceptions.DimensionError):
        sensing.structured_product(ProductKind.GEN_KHATRI_RAO, np.ones((2, 4)), np.ones((2, 4)), partitions=3)


def _mimo_setup(rng, n_f, n_w, N_T=3, N_R=4, M_R=2):
    a_t = channel.build_dictionary(N_T, 4)
    a_r = channel.build_dictionary(N_R, 5)
    f = rng.standard_normal((n_f, N_T)) + 1j * rng.standard_normal((n_f, N_T))
    w = rng.standard_normal((n_w, M_R, N_R)) + 1j * rng.standard_normal((n_w, M_R, N_R))
    h = rng.standard_normal((N_R, N_T)) + 1j * rng.standard_normal((N_R, N_T))
    return a_t, a_r, f, w, h


@pytest.mark.parametrize(
    "mode, n_f, n_w",
    [
        (ScheduleMode.AVERAGED, 1, 1),
        (ScheduleMode.STACKED_COMBINERS, 1, 3),
        (ScheduleMode.STACKED_PRECODERS, 3, 1),
        (ScheduleMode.FULLY_VARYING, 3, 3),
    ],
)
def test_aggregate_mimo_sensing_matches_direct_products(rng, mode, n_f, n_w):
    a_t, a_r, f, w, h = _mimo_setup(rng, n_f, n_w)
    symbols = max(n_f, n_w)

    theta, dictionary = sensing.aggregate_mimo_sensing(mode, f, w, a_t, a_r)
    pairs = [(f[min(s, n_f - 1)], w[min(s, n_w - 1)]) for s in range(symbols)]
    direct = [wi @ h @ fi for fi, wi in pairs]
    if mode == ScheduleMode.AVERAGED:
        direct = direct[:1]

    assert np.allclose(theta @ h.reshape(-1, order="F"), np.concatenate(direct))
    assert dictionary.atoms == 20


def test_aggregate_mimo_sensing_rejects_mismatch(rng):
    a_t, a_r, f, w, _ = _mimo_setup(rng, 3, 1)

    with pytest.raises(exceptions.ConfigurationError):
        sensing.aggregate_mimo_sensing(ScheduleMode.AVERAGED, f, w, a_t, a_r)


def test_kronecker_sensing_matches_dense(rng):
    cfg = channel.ScenarioConfig(N=8, M=4, D=8, L=2, T=2, N_T=3, M_T=2, D_T=4, N_R=4, M_R=2, D_R=5)
    ensemble = sensing.draw_mimo_ensemble(cfg, ScheduleMode.FULLY_VARYING, rng)
    stack = ensemble.sensing()
    dense = sensing.DenseSensing(stack.dense())
    x = rng.standard_normal((2, stack.rows, 3)) + 1j * rng.standard_normal((2, stack.rows, 3))

    assert stack.rows == 4
    assert np.allclose(stack.adjoint(x), dense.adjoint(x))
    assert np.allclose(stack.columns([0, 7, 19]), dense.columns([0, 7, 19]))


def test_draw_mimo_ensemble_shapes(rng):
    cfg = channel.ScenarioConfig(N=8, M=4, D=8, L=2, T=3, N_T=4, M_T=2, D_T=4, N_R=4, M_R=2, D_R=4)

    ensemble = sensing.draw_mimo_ensemble(cfg, ScheduleMode.STACKED_COMBINERS, rng)

    assert ensemble.precoders.shape == (3, 1, 4)
    assert ensemble.combiners.shape == (3, 2, 2, 4)
    assert ensemble.theta.shape == (3, 4, 16)
    for w in ensemble.combiners.reshape(-1, 2, 4):
        assert np.allclose(w @ w.conj().T, np.eye(2), atol=TOLERANCES.tight_frame)


def test_dense_sensing_broadcast():
    stack = sensing.DenseSensing(np.ones((4, 6)))

    assert stack.frames == 1
    assert stack.broadcast(3).frames == 3
    assert stack.repeat(2).frames == 2
    with pytest.raises(exceptions.DimensionError):
        stack.repeat(2).broadcast(3)


def test_as_sensing_list():
    stack = sensing.as_sensing([np.eye(2), 2 * np.eye(2)])

    assert stack.frames == 2
    assert np.allclose(stack.frame(1).dense()[0], 2 * np.eye(2))


def test_frame_metrics_welch_known_value(rng):
    _, welch = sensing.frame_metrics(rng.standard_normal((8, 64)) + 1j * rng.standard_normal((8, 64)))

    assert welch == pytest.approx(1.0 / 3.0)


def test_frame_metrics_repeated_column_is_fully_coherent(rng):
    phi = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    phi[:, 5] = 2j * phi[:, 1]

    coherence, _ = sensing.frame_metrics(phi)

    assert coherence == pytest.approx(1.0)
