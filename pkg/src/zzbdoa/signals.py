"""Hybrid coherent/incoherent source ensembles and the Gaussian data model."""

from dataclasses import dataclass, field, replace

import numpy as np

from .arrays import ArrayGeometry, steering_derivatives, steering_matrix


@dataclass(frozen=True)
class SourceEnsemble:
    """K sources whose first ``coherent_count`` are scaled copies of source 1.

    ``powers`` holds ``[sigma_1^2, sigma_{L+1}^2, ..., sigma_K^2]``: one power
    for the coherent block (the reference signal) followed by one per
    incoherent source. ``beta[0]`` must be exactly 1.
    """

    num_sources: int
    coherent_count: int = 1
    beta: np.ndarray = field(default=None, repr=False)
    powers: np.ndarray = field(default=None, repr=False)
    noise_power: float = 1.0

    def __post_init__(self):
        K, L = self.num_sources, self.coherent_count
        if K < 1:
            raise ValueError("num_sources must be >= 1")
        if not 1 <= L <= K:
            raise ValueError(f"coherent_count must lie in [1, {K}], got {L}")
        beta = np.ones(1, complex) if self.beta is None else np.asarray(self.beta, complex).ravel()
        if beta.size != L:
            raise ValueError(f"beta must have length {L}, got {beta.size}")
        if beta[0] != 1:
            raise ValueError("beta[0] must equal 1 (reference signal)")
        powers = np.ones(K - L + 1) if self.powers is None else np.asarray(self.powers, float).ravel()
        if powers.size != K - L + 1:
            raise ValueError(f"powers must have length {K - L + 1}, got {powers.size}")
        if np.any(powers <= 0):
            raise ValueError("source powers must be positive")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")
        for arr in (beta, powers):
            arr.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "noise_power", float(self.noise_power))

    @property
    def beta_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.beta) ** 2))

    @property
    def snrs(self) -> np.ndarray:
        """Per-group SNRs ``[eta_1, eta_{L+1}, ..., eta_K]``."""
        return self.powers / self.noise_power

    @property
    def num_nuisance(self) -> int:
        """Number of power parameters, noise power included."""
        return self.powers.size + 1

    def with_snr_db(self, snr_db: float) -> "SourceEnsemble":
        """Copy with the noise power set so that ``eta_1 = 10**(snr_db/10)``.

        Source powers are left untouched so relative powers and beta are kept.
        """
        return replace(self, noise_power=self.powers[0] / 10.0 ** (snr_db / 10.0))

    def with_beta(self, beta) -> "SourceEnsemble":
        return replace(self, beta=np.asarray(beta, complex))


@dataclass(frozen=True)
class Scenario:
    """Array, sources, snapshot count and the uniform DOA prior (radians)."""

    geometry: ArrayGeometry
    ensemble: SourceEnsemble
    snapshots: int
    prior_min: float
    prior_max: float
    min_separation: float = 0.0

    def __post_init__(self):
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")
        if not self.prior_min < self.prior_max:
            raise ValueError("prior_min must be smaller than prior_max")
        if self.min_separation < 0:
            raise ValueError("min_separation must be >= 0")
        K = self.ensemble.num_sources
        if (K - 1) * self.min_separation >= self.prior_width:
            raise ValueError("prior support too narrow for the requested separation")

    @property
    def prior_width(self) -> float:
        return self.prior_max - self.prior_min


def signal_covariance(ens: SourceEnsemble) -> np.ndarray:
    K, L = ens.num_sources, ens.coherent_count
    sigma = np.zeros((K, K), complex)
    sigma[:L, :L] = ens.powers[0] * np.outer(ens.beta, ens.beta.conj())
    sigma[np.arange(L, K), np.arange(L, K)] = ens.powers[1:]
    return sigma


def _hermitian(a):
    return 0.5 * (a + a.conj().T)


def observation_covariance(geom: ArrayGeometry, ens: SourceEnsemble, thetas) -> np.ndarray:
    """``A Sigma A^H + sigma_n^2 I`` for DOAs ``thetas`` (radians)."""
    thetas = np.atleast_1d(np.asarray(thetas, float))
    if thetas.size != ens.num_sources:
        raise ValueError(f"expected {ens.num_sources} angles, got {thetas.size}")
    A = steering_matrix(geom, thetas)
    R = A @ signal_covariance(ens) @ A.conj().T
    R[np.diag_indices_from(R)] += ens.noise_power
    return _hermitian(R)


def covariance_derivatives(geom: ArrayGeometry, ens: SourceEnsemble, thetas) -> np.ndarray:
    """Stack of ``dR/dtheta_i``, shape (K, M, M)."""
    thetas = np.atleast_1d(np.asarray(thetas, float))
    A = steering_matrix(geom, thetas)
    dA = steering_derivatives(geom, thetas)
    AS = A @ signal_covariance(ens)  # column i is (A Sigma)_{:, i}
    # dR/dtheta_i = da_i (A Sigma)_{:,i}^H + (A Sigma)_{:,i} da_i^H
    first = np.einsum("mi,ni->imn", dA, AS.conj())
    return first + first.conj().transpose(0, 2, 1)


def covariance_derivative(geom: ArrayGeometry, ens: SourceEnsemble, thetas, i: int) -> np.ndarray:
    K = ens.num_sources
    if not 0 <= i < K:
        raise IndexError(f"source index {i} out of range for K={K}")
    return covariance_derivatives(geom, ens, thetas)[i]


def power_derivatives(geom: ArrayGeometry, ens: SourceEnsemble, thetas) -> np.ndarray:
    """Stack of dR/d(sigma_1^2), dR/d(sigma_k^2) for k > L, and dR/d(sigma_n^2)."""
    thetas = np.atleast_1d(np.asarray(thetas, float))
    L = ens.coherent_count
    A = steering_matrix(geom, thetas)
    M = A.shape[0]
    coherent = A[:, :L] @ ens.beta
    cols = np.column_stack([coherent, A[:, L:]])
    out = np.empty((cols.shape[1] + 1, M, M), complex)
    out[:-1] = np.einsum("mi,ni->imn", cols, cols.conj())
    out[-1] = np.eye(M)
    return out


def circular_gaussian(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Circular complex Gaussian samples with ``E|x|^2 = variance``."""
    scale = np.sqrt(np.asarray(variance, float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_snapshots(scenario: Scenario, thetas, seed) -> np.ndarray:
    """Draw the M x T data matrix ``X = A s + n``.

    ``seed`` may be anything accepted by ``np.random.default_rng``; equal
    seeds give bit-identical output.
    """
    rng = np.random.default_rng(seed)
    ens = scenario.ensemble
    K, L, T = ens.num_sources, ens.coherent_count, scenario.snapshots
    A = steering_matrix(scenario.geometry, thetas)
    base = circular_gaussian(rng, (ens.powers.size, T), ens.powers[:, None])
    s = np.empty((K, T), complex)
    s[:L] = ens.beta[:, None] * base[0]
    s[L:] = base[1:]
    noise = circular_gaussian(rng, (A.shape[0], T), ens.noise_power)
    return A @ s + noise
