import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zzbdoa.arrays import coprime, ula
from zzbdoa.estimators import (
    SpectralGrid,
    make_record,
    music_estimate,
    music_spectrum,
    rmse,
    sample_covariance,
)
from zzbdoa.signals import SourceEnsemble, observation_covariance

GRID = SpectralGrid.from_step(np.deg2rad(-60), np.deg2rad(60), np.deg2rad(0.01))


def test_example_ordering_rmse():
    truth = np.deg2rad([30.0, 45.0])
    assert rmse([make_record(truth, np.deg2rad([29.0, 44.0]))]) == pytest.approx(1.0)
    assert rmse([make_record(truth, np.deg2rad([44.0, 29.0]))]) == pytest.approx(1.0)
    naive = np.sqrt(np.mean((np.array([44.0, 29.0]) - np.array([30.0, 45.0])) ** 2))
    assert naive == pytest.approx(15.03, abs=0.005)
    assert rmse([make_record(truth, truth)]) == 0.0


@given(st.permutations([0.1, -0.3, 0.5, 0.2]))
def test_rmse_permutation_invariant(perm):
    truth = [-0.31, 0.09, 0.22, 0.48]
    ref = rmse([make_record(truth, [-0.3, 0.1, 0.2, 0.5])])
    assert rmse([make_record(truth, perm)]) == pytest.approx(ref, rel=1e-14)


def test_rmse_errors():
    with pytest.raises(ValueError):
        rmse([])
    with pytest.raises(ValueError):
        rmse([make_record([0.1])])
    with pytest.raises(ValueError):
        rmse([make_record([0.1], [0.1]), make_record([0.1, 0.2], [0.1, 0.2])])
    with pytest.raises(ValueError):
        make_record([0.1, 0.2], [0.1])


def test_sample_covariance():
    x = np.array([[1.0 + 1j], [2.0], [-1j]])
    np.testing.assert_allclose(sample_covariance(x), x @ x.conj().T)
    X = np.random.default_rng(0).standard_normal((4, 7)) + 1j
    assert np.linalg.eigvalsh(sample_covariance(X)).min() > -1e-12
    with pytest.raises(ValueError):
        sample_covariance(np.zeros(3))


def test_music_single_source_exact_covariance():
    geom = ula(20)
    R = observation_covariance(geom, SourceEnsemble(1).with_snr_db(60), [np.deg2rad(20.0)])
    est = music_estimate(R, 1, geom, GRID)
    assert abs(est[0] - np.deg2rad(20.0)) <= GRID.step


def test_music_two_sources_exact_covariance():
    geom = ula(20)
    truth = np.deg2rad([-30.0, 40.0])
    R = observation_covariance(geom, SourceEnsemble(2, powers=[1.0, 1.0]).with_snr_db(20), truth)
    est = music_estimate(R, 2, geom, GRID)
    assert np.all(np.abs(np.rad2deg(est - truth)) < 0.05)


def test_music_output_contract():
    geom = ula(8)
    rng = np.random.default_rng(5)
    for _ in range(20):
        X = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
        est = music_estimate(sample_covariance(X), 3, geom, GRID)
        assert est.shape == (3,)
        assert np.all(np.diff(est) >= 0)
        assert np.all((est >= GRID.start) & (est <= GRID.stop))


def test_music_spectrum_positive():
    geom = ula(6)
    R = observation_covariance(geom, SourceEnsemble(2, powers=[1.0, 1.0]), [-0.3, 0.4])
    p = music_spectrum(R, 2, geom, GRID)
    assert np.all(np.isfinite(p)) and np.all(p > 0)


def test_music_rejects_underdetermined():
    geom = coprime(3, 5)
    with pytest.raises(ValueError):
        music_estimate(np.eye(10), 10, geom, GRID)


def test_spectral_grid():
    g = SpectralGrid.from_step(-1.0, 1.0, 0.5)
    np.testing.assert_allclose(g.angles, [-1, -0.5, 0, 0.5, 1])
    assert g.step == 0.5
    with pytest.raises(ValueError):
        SpectralGrid(1.0, -1.0, 10)
    with pytest.raises(ValueError):
        SpectralGrid(-2.0, 1.0, 10)
