import cmath
import dataclasses
import math

import numpy as np
import pytest

from hybridcov import channel
from hybridcov import exceptions
from hybridcov.common import TOLERANCES


def test_scenario_defaults():
    cfg = channel.ScenarioConfig()

    assert (cfg.N, cfg.M, cfg.D, cfg.L) == (64, 8, 64, 8)
    assert not cfg.mimo
    assert np.isclose(cfg.sigma2, 0.1)


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"M": 65}, "M"),
        ({"L": 9}, "L"),
        ({"D": 32}, "D"),
        ({"T": 0}, "T"),
        ({"N_T": 4, "M_T": 2, "D_T": 2, "N_R": 4, "M_R": 2, "D_R": 4}, "D_T"),
    ],
)
def test_scenario_validation(changes, field):
    with pytest.raises(exceptions.ConfigurationError) as e:
        channel.ScenarioConfig(**changes)

    assert e.value.field == field


@pytest.mark.parametrize("snr_db, sigma2", [(None, 0.0), (0.0, 1.0), (10.0, 0.1), (-10.0, 10.0)])
def test_noise_variance(snr_db, sigma2):
    assert np.isclose(channel.noise_variance(snr_db), sigma2)


def test_ula_response():
    a = channel.ula_response(np.pi / 2, 4)

    assert np.allclose(a, [1, 1j, -1, -1j])


def test_ula_response_bad_size():
    with pytest.raises(exceptions.ConfigurationError):
        channel.ula_response(0.0, 0)


@pytest.mark.parametrize("N, D", [(8, 8), (8, 16), (16, 64), (6, 9)])
def test_dictionary_is_tight(N, D):
    dictionary = channel.build_dictionary(N, D)
    a = dictionary.matrix

    assert a.shape == (N, D)
    assert dictionary.grid[0] == -np.pi
    assert np.allclose(a @ a.conj().T, D * np.eye(N), atol=TOLERANCES.dictionary_frame * D)


def test_dictionary_too_small():
    with pytest.raises(exceptions.ConfigurationError):
        channel.build_dictionary(8, 4)


def test_kronecker_dictionary_columns():
    dictionary = channel.KroneckerDictionary(tx=channel.build_dictionary(3, 4), rx=channel.build_dictionary(2, 3))
    idx = [0, 5, 11]

    assert dictionary.atoms == 12
    assert dictionary.antennas == 6
    assert [t.tolist() for t in dictionary.split(idx)] == [[0, 1, 3], [0, 2, 2]]
    assert np.allclose(dictionary.columns(idx), dictionary.dense()[:, idx])


def test_draw_channel_on_grid():
    cfg = channel.ScenarioConfig(N=16, M=4, D=32, L=3, T=5)
    dictionary = channel.build_dictionary(16, 32)

    h = channel.draw_channel(cfg, np.random.default_rng(0), dictionary)

    assert h.on_grid
    assert len(set(h.support.tolist())) == 3
    assert h.gains.shape == (3, 5)
    assert np.allclose(h.paths, dictionary.matrix[:, h.support])
    assert h.channel_vectors().shape == (16, 5)
    assert np.allclose(np.pi * np.sin(h.aoas), h.omegas)


def test_draw_channel_off_grid():
    cfg = channel.ScenarioConfig(N=16, M=4, D=32, L=3, T=2, on_grid=False)

    h = channel.draw_channel(cfg, np.random.default_rng(0))

    assert h.support is None
    assert np.all(np.abs(h.aoas) <= np.pi / 2)
    assert np.allclose(h.paths, channel.manifold(h.omegas, 16))


def test_draw_channel_reproducible():
    cfg = channel.ScenarioConfig(N=8, M=4, D=16, L=2, T=3, on_grid=False)

    a = channel.draw_channel(cfg, np.random.default_rng(42))
    b = channel.draw_channel(cfg, np.random.default_rng(42))

    assert np.array_equal(a.gains, b.gains)
    assert np.array_equal(a.aoas, b.aoas)


def test_true_covariance():
    cfg = channel.ScenarioConfig(N=8, M=4, D=16, L=2, T=1)
    h = channel.draw_channel(cfg, np.random.default_rng(3))

    r = h.true_covariance().dense()

    assert np.allclose(r, h.paths @ h.paths.conj().T)
    assert np.isclose(np.real(np.trace(r)), 2 * 8)


def test_subcarrier_taps_integer_delay():
    taps = channel.subcarrier_taps([0.0, 2.0], N_cp=4, K=8)
    k = np.arange(8)

    assert taps.shape == (2, 8)
    assert np.allclose(taps[0], 1.0, atol=1e-12)
    assert np.allclose(taps[1], np.exp(-2j * np.pi * 2 * k / 8), atol=1e-12)


def test_subcarrier_taps_fractional_delay():
    tau, n_cp, K = 2.5, 8, 16
    expected = np.zeros(K, dtype=complex)
    for k in range(K):
        for d in range(n_cp):
            x = d - tau
            pulse = math.sin(math.pi * x) / (math.pi * x)
            expected[k] += pulse * cmath.exp(-2j * math.pi * k * d / K)

    taps = channel.subcarrier_taps([tau], N_cp=n_cp, K=K)

    assert np.allclose(taps[0], expected, atol=1e-12)


def test_subcarrier_taps_bad_delay():
    with pytest.raises(exceptions.ConfigurationError):
        channel.subcarrier_taps([4.0], N_cp=4, K=8)


def test_draw_wideband_channel():
    cfg = channel.ScenarioConfig(N=8, M=4, D=16, L=2, T=3, on_grid=False, wideband=True, K=16, N_cp=4)

    h = channel.draw_channel(cfg, np.random.default_rng(5))

    assert h.taps.shape == (2, 16)
    assert np.all((h.delays >= 0) & (h.delays < 4))
    assert h.path_powers().shape == (2,)


def test_draw_mimo_channel():
    cfg = channel.ScenarioConfig(N=8, M=4, D=8, L=2, T=3, N_T=4, M_T=2, D_T=4, N_R=3, M_R=2, D_R=6)
    dictionary = channel.build_mimo_dictionary(cfg)

    h = channel.draw_mimo_channel(cfg, np.random.default_rng(9), dictionary)
    matrices = h.channel_matrices()

    assert h.paths.shape == (12, 2)
    assert matrices.shape == (3, 3, 4)
    for t in range(3):
        assert np.allclose(matrices[t].reshape(-1, order="F"), h.channel_vectors()[:, t])
    assert np.allclose(h.paths, dictionary.columns(h.support))


def test_draw_mimo_channel_needs_dimensions():
    with pytest.raises(exceptions.ConfigurationError):
        channel.draw_mimo_channel(dataclasses.replace(channel.ScenarioConfig(), T=2), np.random.default_rng(0))


def test_mimo_channel_matrices_from_array_responses():
    cfg = channel.ScenarioConfig(N=8, M=4, D=8, L=3, T=2, on_grid=False, N_T=4, M_T=2, D_T=4, N_R=5, M_R=2, D_R=8)

    h = channel.draw_mimo_channel(cfg, np.random.default_rng(21))

    for t in range(cfg.T):
        expected = np.zeros((cfg.N_R, cfg.N_T), dtype=complex)
        for l in range(cfg.L):
            a_rx = channel.ula_response(h.omegas[l], cfg.N_R)
            a_tx = channel.ula_response(h.tx_omegas[l], cfg.N_T)
            expected += h.gains[l, t] * np.outer(a_rx, np.conj(a_tx))
        assert np.allclose(h.channel_matrices()[t], expected)
