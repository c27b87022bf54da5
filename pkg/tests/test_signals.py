import numpy as np
import pytest

from zzbdoa.arrays import steering_matrix, ula
from zzbdoa.estimators import sample_covariance
from zzbdoa.signals import (
    Scenario,
    SourceEnsemble,
    covariance_derivative,
    generate_snapshots,
    observation_covariance,
    signal_covariance,
)


def test_signal_covariance_incoherent():
    ens = SourceEnsemble(2, 1, powers=[2.0, 3.0])
    np.testing.assert_allclose(signal_covariance(ens), np.diag([2.0, 3.0]))


def test_signal_covariance_coherent_block():
    ens = SourceEnsemble(2, 2, beta=[1, 0.9], powers=[1.0])
    np.testing.assert_allclose(signal_covariance(ens), [[1, 0.9], [0.9, 0.81]])
    ens = SourceEnsemble(4, 3, beta=[1, 0.5j, -0.7], powers=[2.0, 1.0])
    assert np.linalg.matrix_rank(signal_covariance(ens)[:3, :3]) == 1


def test_ensemble_validation():
    with pytest.raises(ValueError):
        SourceEnsemble(2, 2, beta=[0.5, 1.0], powers=[1.0])
    with pytest.raises(ValueError):
        SourceEnsemble(2, 1, powers=[1.0, -1.0])
    with pytest.raises(ValueError):
        SourceEnsemble(2, 3)
    with pytest.raises(ValueError):
        SourceEnsemble(1, noise_power=0.0)


def test_with_snr_db_scales_noise_only():
    ens = SourceEnsemble(3, 2, beta=[1, 0.8], powers=[2.0, 0.5]).with_snr_db(10)
    np.testing.assert_allclose(ens.powers, [2.0, 0.5])
    np.testing.assert_allclose(ens.snrs, [10.0, 2.5])


def test_observation_covariance_small_case():
    R = observation_covariance(ula(2), SourceEnsemble(1), [0.0])
    np.testing.assert_allclose(R, [[2, 1], [1, 2]])


def test_observation_covariance_structure():
    g = ula(7)
    ens = SourceEnsemble(4, 2, beta=[1, 0.6 - 0.3j], powers=[1.5, 0.7, 2.0], noise_power=0.4)
    th = np.deg2rad([-40, -5, 20, 51])
    R = observation_covariance(g, ens, th)
    np.testing.assert_array_equal(R, R.conj().T)
    # coherent cross terms make the trace Tr(A^H A Sigma), not M Tr(Sigma)
    A = steering_matrix(g, th)
    trace = g.num_sensors * ens.noise_power + np.trace(A.conj().T @ A @ signal_covariance(ens)).real
    assert np.trace(R).real == pytest.approx(trace)
    assert np.linalg.eigvalsh(R).min() >= ens.noise_power - 1e-10


def test_observation_covariance_trace_incoherent():
    g = ula(9)
    ens = SourceEnsemble(3, powers=[1.0, 2.5, 0.3], noise_power=0.7)
    R = observation_covariance(g, ens, [-0.3, 0.4, 0.9])
    assert np.trace(R).real == pytest.approx(9 * 0.7 + 9 * 3.8)


def test_covariance_derivative_matches_finite_difference():
    g = ula(6)
    ens = SourceEnsemble(3, 2, beta=[1, 0.7 * np.exp(0.4j)], powers=[1.0, 0.5], noise_power=0.3)
    th = np.deg2rad([-30.0, 5.0, 40.0])
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (observation_covariance(g, ens, th + e) - observation_covariance(g, ens, th - e)) / (2 * h)
        an = covariance_derivative(g, ens, th, i)
        np.testing.assert_allclose(an, an.conj().T)
        assert np.linalg.norm(fd - an) / np.linalg.norm(an) < 1e-5
    with pytest.raises(IndexError):
        covariance_derivative(g, ens, th, 3)


def test_covariance_derivative_vanishes_for_absent_source():
    ens = SourceEnsemble(2, 1, powers=[1.0, 1e-14])
    d = covariance_derivative(ula(5), ens, [0.1, 0.6], 1)
    assert np.abs(d).max() < 1e-12


def _scenario(ens, T):
    return Scenario(ula(4), ens, T, -np.pi / 3, np.pi / 3)


def test_snapshots_reproducible():
    sc = _scenario(SourceEnsemble(2, powers=[1.0, 2.0]), 50)
    a = generate_snapshots(sc, [0.1, -0.4], 123)
    b = generate_snapshots(sc, [0.1, -0.4], 123)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (4, 50)


def test_snapshot_covariance_converges():
    ens = SourceEnsemble(3, 2, beta=[1, 0.8j], powers=[1.0, 0.5], noise_power=0.5)
    th = [-0.5, 0.2, 0.7]
    sc = _scenario(ens, 10**6)
    Rhat = sample_covariance(generate_snapshots(sc, th, 5))
    R = observation_covariance(sc.geometry, ens, th)
    assert np.linalg.norm(Rhat - R) / np.linalg.norm(R) < 0.01


def test_noise_only_limit():
    ens = SourceEnsemble(2, powers=[1e-12, 1e-12], noise_power=2.0)
    sc = _scenario(ens, 10**5)
    Rhat = sample_covariance(generate_snapshots(sc, [0.0, 0.5], 9))
    assert np.linalg.norm(Rhat - 2.0 * np.eye(4)) / np.linalg.norm(2.0 * np.eye(4)) < 0.01


def test_coherent_sources_rank_one():
    # near noise-free data: recover s(t) by least squares and check its covariance
    ens = SourceEnsemble(2, 2, beta=[1, 0.9], powers=[1.0], noise_power=1e-12)
    th = [-0.5, 0.5]
    sc = _scenario(ens, 10**5)
    X = generate_snapshots(sc, th, 11)
    S = np.linalg.pinv(steering_matrix(sc.geometry, th)) @ X
    w = np.linalg.eigvalsh(sample_covariance(S))
    assert w[0] < 0.01 * w[1]


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(ula(4), SourceEnsemble(5), 10, -0.5, 0.5, min_separation=0.3)
    with pytest.raises(ValueError):
        Scenario(ula(4), SourceEnsemble(1), 0, -0.5, 0.5)
    assert Scenario(ula(4), SourceEnsemble(1), 1, -1.0, 1.0).prior_width == 2.0
