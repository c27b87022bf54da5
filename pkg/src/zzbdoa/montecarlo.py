"""Seeded Monte-Carlo trials, SNR sweeps and the hypothesis-test oracle.

Every trial draws from its own stream ``SeedSequence([seed, point, trial])``
so results do not depend on how trials are scheduled across workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular

from .bounds import BoundInputs, BoundValue, apb, zzb
from .estimators import SpectralGrid, make_record, music_estimate, rmse, sample_covariance
from .fisher import DegenerateGeometryError, crb_matrix
from .signals import Scenario, circular_gaussian, generate_snapshots

MAX_REJECTIONS = 10**6
UNRELIABLE_FRACTION = 0.01


class InfeasibleSamplingError(RuntimeError):
    pass


def sample_doas(K, prior_min, prior_max, min_sep, rng, batch=256) -> np.ndarray:
    """K uniform DOAs whose sorted neighbours are at least ``min_sep`` apart.

    Rejection sampling in batches; the returned vector is in draw order
    (unsorted).
    """
    if (K - 1) * min_sep >= prior_max - prior_min:
        raise InfeasibleSamplingError("separation constraint cannot be met")
    rejected = 0
    while rejected <= MAX_REJECTIONS:
        draws = rng.uniform(prior_min, prior_max, size=(batch, K))
        if K == 1:
            return draws[0]
        gaps = np.diff(np.sort(draws, axis=1), axis=1)
        ok = np.flatnonzero(np.all(gaps >= min_sep, axis=1))
        if ok.size:
            return draws[ok[0]]
        rejected += batch
    raise InfeasibleSamplingError(f"no admissible DOA draw after {MAX_REJECTIONS} rejections")


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario
    snr_grid_db: np.ndarray
    trials_per_point: int = 1000
    master_seed: int = 0
    estimator_enabled: bool = True
    random_coherent_phases: bool = False
    grid_step: float = np.deg2rad(0.01)
    fim_method: str | None = None

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.snr_grid_db, float))
        if grid.size == 0:
            raise ValueError("SNR grid is empty")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("SNR grid must be strictly increasing")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "snr_grid_db", grid)

    @property
    def spectral_grid(self) -> SpectralGrid:
        sc = self.scenario
        return SpectralGrid.from_step(sc.prior_min, sc.prior_max, self.grid_step)


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    zzb_deg: float
    zzb_generalized_deg: float
    crb_deg: float
    apb_deg: float
    rmse_deg: float | None
    coef_pl_mean: float
    coef_gamma_mean: float
    degenerate_fraction: float

    @property
    def unreliable(self) -> bool:
        return self.degenerate_fraction > UNRELIABLE_FRACTION


@dataclass(frozen=True)
class BoundCurve:
    points: list = field(default_factory=list)

    def column(self, name) -> np.ndarray:
        return np.array([np.nan if getattr(p, name) is None else getattr(p, name)
                         for p in self.points], float)

    @property
    def snr_db(self):
        return self.column("snr_db")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _trial_rng(master_seed, point_index, trial_index):
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), point_index, trial_index]))


def _with_random_phases(ensemble, rng):
    beta = ensemble.beta.copy()
    phases = rng.uniform(-np.pi, np.pi, size=beta.size - 1)
    beta[1:] = np.abs(beta[1:]) * np.exp(1j * phases)
    return ensemble.with_beta(beta)


def run_trial(
    scenario: Scenario,
    snr_db: float,
    trial_index: int,
    master_seed: int,
    point_index: int = 0,
    *,
    estimator_enabled: bool = True,
    random_coherent_phases: bool = False,
    grid: SpectralGrid | None = None,
    fim_method: str | None = None,
):
    """One deterministic trial: DOAs, bound at those DOAs, MUSIC estimate.

    Returns ``(TrialRecord, BoundValue)``. A degenerate Fisher matrix is
    flagged in both outputs instead of raising.
    """
    rng = _trial_rng(master_seed, point_index, trial_index)
    ens = scenario.ensemble.with_snr_db(snr_db)
    if random_coherent_phases and ens.coherent_count > 1:
        ens = _with_random_phases(ens, rng)
    K = ens.num_sources
    thetas = sample_doas(K, scenario.prior_min, scenario.prior_max, scenario.min_separation, rng)
    geom = scenario.geometry
    try:
        fisher = crb_matrix(geom, ens, thetas, scenario.snapshots, fim_method)
    except DegenerateGeometryError:
        fisher = None
    inputs = BoundInputs(geom.num_sensors, scenario.snapshots, ens.snrs, ens.beta,
                         scenario.prior_width, fisher)
    bound = zzb(inputs)
    estimate = None
    if estimator_enabled and K < geom.num_sensors:
        grid = grid or SpectralGrid.from_step(scenario.prior_min, scenario.prior_max, np.deg2rad(0.01))
        X = generate_snapshots(replace(scenario, ensemble=ens), thetas, rng)
        estimate = music_estimate(sample_covariance(X), K, geom, grid)
    return make_record(thetas, estimate, fisher is None), bound


def _aggregate(snr_db, results, zeta, K, with_rmse):
    records = [r for r, _ in results]
    bounds: list[BoundValue] = [b for _, b in results]
    zz = np.mean([b.zzb for b in bounds])
    zg = np.mean([b.zzb_generalized for b in bounds])
    valid = [b.crb for b in bounds if not b.degenerate]
    crb = np.mean(valid) if valid else np.nan
    deg = lambda v: float(np.rad2deg(np.sqrt(v)))  # noqa: E731
    return CurvePoint(
        snr_db=float(snr_db),
        zzb_deg=deg(zz),
        zzb_generalized_deg=deg(zg),
        crb_deg=deg(crb),
        apb_deg=deg(apb(K, zeta)),
        rmse_deg=rmse(records) if with_rmse else None,
        coef_pl_mean=float(np.mean([b.coef_pl for b in bounds])),
        coef_gamma_mean=float(np.mean([b.coef_gamma for b in bounds])),
        degenerate_fraction=float(np.mean([b.degenerate for b in bounds])),
    )


def snr_sweep(config: SweepConfig, threads: int = 1) -> BoundCurve:
    """Average the per-trial bounds and the ordered RMSE at every SNR point.

    Trial results are reduced in trial-index order, so the curve is identical
    for any ``threads`` value.
    """
    sc = config.scenario
    K = sc.ensemble.num_sources
    with_rmse = config.estimator_enabled and K < sc.geometry.num_sensors
    grid = config.spectral_grid
    jobs = [(p, t) for p in range(config.snr_grid_db.size) for t in range(config.trials_per_point)]

    def task(job):
        p, t = job
        return run_trial(sc, config.snr_grid_db[p], t, config.master_seed, p,
                         estimator_enabled=with_rmse,
                         random_coherent_phases=config.random_coherent_phases,
                         grid=grid, fim_method=config.fim_method)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, jobs))
    else:
        results = [task(j) for j in jobs]
    n = config.trials_per_point
    points = [
        _aggregate(snr, results[p * n:(p + 1) * n], sc.prior_width, K, with_rmse)
        for p, snr in enumerate(config.snr_grid_db)
    ]
    return BoundCurve(points)


def _gaussian_loglik_terms(X, chol):
    """Sum over snapshots of ``x^H R^-1 x`` for each trial (X: trials x M x T)."""
    n, M, T = X.shape
    W = solve_triangular(chol, X.transpose(1, 0, 2).reshape(M, -1), lower=True)
    return np.sum(np.abs(W.reshape(M, n, T)) ** 2, axis=(0, 2))


def min_error_probability_mc(R0, R1, prior0, T, num_trials, seed):
    """Monte-Carlo error rate of the optimal test between ``CN(0,R0)`` and ``CN(0,R1)``.

    Each trial picks a hypothesis with probabilities ``(prior0, 1 - prior0)``,
    draws T snapshots and applies the likelihood-ratio test with threshold
    ``ln(prior0 / (1 - prior0))``. Returns ``(estimate, standard_error)``.
    """
    if not 0 < prior0 < 1:
        raise ValueError("prior0 must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    c0, c1 = np.linalg.cholesky(R0), np.linalg.cholesky(R1)
    M = R0.shape[0]
    truth = rng.random(num_trials) >= prior0  # True -> H1
    Z = circular_gaussian(rng, (num_trials, M, T))
    X = np.where(truth[:, None, None], c1 @ Z, c0 @ Z)
    logdet0 = 2 * np.sum(np.log(np.diag(c0).real))
    logdet1 = 2 * np.sum(np.log(np.diag(c1).real))
    llr = (_gaussian_loglik_terms(X, c0) - _gaussian_loglik_terms(X, c1)
           + T * (logdet0 - logdet1))
    decide_h1 = llr > np.log(prior0 / (1 - prior0))
    errors = decide_h1 != truth
    p = float(errors.mean())
    return p, float(np.sqrt(p * (1 - p) / num_trials))
