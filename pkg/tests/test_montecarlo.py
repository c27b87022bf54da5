import numpy as np
import pytest
from scipy import stats

from zzbdoa.arrays import ula
from zzbdoa.bounds import pmin_lower_bound_exact
from zzbdoa.montecarlo import (
    InfeasibleSamplingError,
    SweepConfig,
    min_error_probability_mc,
    run_trial,
    sample_doas,
    snr_sweep,
)
from zzbdoa.signals import Scenario, SourceEnsemble, observation_covariance

LO, HI = np.deg2rad(-60.0), np.deg2rad(60.0)


def _scenario(K=1, min_sep_deg=10.0, M=20, T=40):
    ens = SourceEnsemble(K, powers=np.ones(K))
    return Scenario(ula(M), ens, T, LO, HI, np.deg2rad(min_sep_deg))


def test_sample_doas_single_source():
    rng = np.random.default_rng(0)
    for _ in range(100):
        th = sample_doas(1, LO, HI, 0.3, rng)
        assert th.shape == (1,) and LO <= th[0] <= HI


def test_sample_doas_respects_separation():
    rng = np.random.default_rng(1)
    sep = np.deg2rad(10.0)
    for _ in range(300):
        th = sample_doas(5, LO, HI, sep, rng)
        assert np.all(np.diff(np.sort(th)) >= sep)
        assert np.all((th >= LO) & (th <= HI))


def test_sample_doas_order_statistic_marginals():
    rng = np.random.default_rng(2)
    draws = np.sort([sample_doas(3, 0.0, 1.0, 0.0, rng) for _ in range(10**5)], axis=1)
    for k in range(1, 4):
        ks = stats.kstest(draws[:, k - 1], stats.beta(k, 3 - k + 1).cdf).statistic
        assert ks < 0.01


def test_sample_doas_infeasible():
    with pytest.raises(InfeasibleSamplingError):
        sample_doas(5, 0.0, 1.0, 0.3, np.random.default_rng(0))


def test_run_trial_deterministic():
    sc = _scenario(K=3)
    a = run_trial(sc, 0.0, 7, 123, 2)
    b = run_trial(sc, 0.0, 7, 123, 2)
    np.testing.assert_array_equal(a[0].theta_true_sorted, b[0].theta_true_sorted)
    np.testing.assert_array_equal(a[0].theta_hat_sorted, b[0].theta_hat_sorted)
    assert a[1] == b[1]
    c = run_trial(sc, 0.0, 8, 123, 2)
    assert not np.array_equal(a[0].theta_true_sorted, c[0].theta_true_sorted)


def test_run_trial_high_snr_errors_near_crb():
    sc = _scenario(K=1)
    hits = 0
    for t in range(1000):
        rec, b = run_trial(sc, 30.0, t, 99)
        hits += rec.squared_errors[0] < 10 * b.crb
    assert hits >= 990


def test_run_trial_low_snr_prior_dominated():
    rec, b = run_trial(_scenario(K=1), -40.0, 0, 5, estimator_enabled=False)
    assert b.coef_pl > 0.99
    assert rec.theta_hat_sorted is None


def test_run_trial_flags_degenerate_geometry():
    ens = SourceEnsemble(11, powers=np.ones(11))
    sc = Scenario(ula(10), ens, 40, LO, HI, np.deg2rad(5.0))
    rec, b = run_trial(sc, 0.0, 0, 1)
    assert rec.degenerate_bound and b.degenerate
    assert rec.theta_hat_sorted is None


def test_snr_sweep_shape_and_thread_independence():
    cfg = SweepConfig(_scenario(K=2), [-30.0, 0.0, 20.0], trials_per_point=12, master_seed=4)
    a = snr_sweep(cfg)
    b = snr_sweep(cfg, threads=3)
    assert a == b
    assert len(a) == 3
    apb = a.column("apb_deg")
    assert np.all(apb == apb[0])
    assert np.all(a.column("zzb_deg") >= 0)
    assert np.all(np.diff(a.column("coef_pl_mean")) <= 0)


def test_snr_sweep_limits():
    cfg = SweepConfig(_scenario(K=1, min_sep_deg=0.0), [-40.0, 30.0], 200, 0, estimator_enabled=False)
    curve = snr_sweep(cfg)
    lo, hi = curve.points
    assert lo.zzb_deg == pytest.approx(lo.apb_deg, rel=0.01)
    assert hi.zzb_deg == pytest.approx(hi.crb_deg, rel=0.02)
    assert lo.rmse_deg is None


def test_sweep_config_validation():
    sc = _scenario()
    with pytest.raises(ValueError):
        SweepConfig(sc, [])
    with pytest.raises(ValueError):
        SweepConfig(sc, [0.0, -1.0])
    with pytest.raises(ValueError):
        SweepConfig(sc, [0.0], trials_per_point=0)


def _hyp_pair(delta, eta, M=4):
    geom = ula(M)
    ens = SourceEnsemble(1, noise_power=1 / eta)
    return observation_covariance(geom, ens, [0.0]), observation_covariance(geom, ens, [delta])


def test_min_error_identical_hypotheses():
    R0, _ = _hyp_pair(0.0, 1.0)
    p, se = min_error_probability_mc(R0, R0, 0.5, 2, 20000, 0)
    assert abs(p - 0.5) < 4 * se


def test_min_error_well_separated():
    R0, R1 = _hyp_pair(np.arcsin(0.5), 100.0)
    p, _ = min_error_probability_mc(R0, R1, 0.5, 2, 20000, 1)
    assert p < 1e-3


def test_min_error_respects_lower_bound():
    for delta in (0.05, 0.2, 0.5):
        R0, R1 = _hyp_pair(delta, 1.0)
        p, se = min_error_probability_mc(R0, R1, 0.5, 2, 20000, 2)
        assert pmin_lower_bound_exact(R0, R1, 2) <= p + 3 * se


def test_min_error_input_checks():
    R0, R1 = _hyp_pair(0.1, 1.0)
    with pytest.raises(ValueError):
        min_error_probability_mc(R0, R1, 1.0, 2, 10, 0)
    with pytest.raises(np.linalg.LinAlgError):
        min_error_probability_mc(-R0, R1, 0.5, 2, 10, 0)
