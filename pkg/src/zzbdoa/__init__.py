"""Ziv-Zakai and Cramer-Rao bounds for multi-source DOA estimation."""

__version__ = "0.1.0"

from .arrays import ArrayGeometry, coprime, steering_derivative, steering_matrix, steering_vector, ula
from .bounds import (
    BoundInputs,
    BoundValue,
    apb,
    gamma_3_2,
    h_tilde,
    mse_scale_factor,
    mu_exact,
    mu_second_derivative_exact,
    order_statistic_variance,
    p_large,
    p_small,
    pmin_lower_bound_exact,
    q_function,
    saturation_level,
    u_tilde,
    zzb,
)
from .estimators import SpectralGrid, TrialRecord, make_record, music_estimate, rmse, sample_covariance
from .fisher import DegenerateGeometryError, FisherMatrix, crb_matrix, fim_trace_form, fim_vec_form
from .montecarlo import BoundCurve, SweepConfig, min_error_probability_mc, run_trial, sample_doas, snr_sweep
from .signals import (
    Scenario,
    SourceEnsemble,
    covariance_derivative,
    generate_snapshots,
    observation_covariance,
    signal_covariance,
)
