"""Ziv-Zakai, Cramer-Rao and a-priori bounds for multi-source DOA estimation.

All quantities are in radians. The explicit ZZB is a combination of the
a-priori bound (weight ``2 P_L``) and the CRB (weight ``Gamma_{3/2}(u)``):

    ZZB = 2 P_L * K zeta^2 / ((K+1)^2 (K+2)) + Gamma_{3/2}(u) * Tr(J^-1) / K
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .fisher import FisherMatrix


def q_function(z):
    """Standard normal tail probability ``Q(z) = P(N(0,1) > z)``."""
    return 0.5 * special.erfc(np.asarray(z, float) / np.sqrt(2.0))


def gamma_3_2(q):
    """Regularised lower incomplete gamma function of order 3/2."""
    q = np.asarray(q, float)
    if np.any(q < 0):
        raise ValueError("gamma_3_2 is defined for q >= 0")
    return special.gammainc(1.5, q)


def _group_snrs(M, eta1, beta, eta_incoherent):
    """``M * eta`` per group; the coherent block acts as power ``eta_1 |beta|^2``."""
    beta = np.atleast_1d(np.asarray(beta, complex))
    eta_inc = np.atleast_1d(np.asarray(eta_incoherent, float))
    etas = np.concatenate([[float(eta1) * np.sum(np.abs(beta) ** 2)], eta_inc])
    if np.any(etas < 0):
        raise ValueError("SNRs must be non-negative")
    return M * etas


def saturation_level(M, eta1, beta, eta_incoherent=()) -> float:
    """``sum_k (M eta_k / (2 + M eta_k))^2`` with the coherent group folded in."""
    y = _group_snrs(M, eta1, beta, eta_incoherent)
    return float(np.sum((y / (2.0 + y)) ** 2))


def log_p_large(M, T, eta1, beta, eta_incoherent=()) -> float:
    """Natural log of the large-error probability ``P_L``.

    Uses ``4(1+y)/(2+y)^2 = 1 - (y/(2+y))^2`` so the log-determinant term is
    a ``log1p`` and nothing underflows at high SNR.
    """
    y = _group_snrs(M, eta1, beta, eta_incoherent)
    x2 = (y / (2.0 + y)) ** 2
    exponent = T * np.sum(np.log1p(-x2) + x2)
    return float(exponent + special.log_ndtr(-np.sqrt(2.0 * T * np.sum(x2))))


def p_large(M, T, eta1, beta, eta_incoherent=()) -> float:
    return float(np.exp(log_p_large(M, T, eta1, beta, eta_incoherent)))


def p_small(delta, fisher: FisherMatrix) -> float:
    """Small-error probability ``Q(sqrt(delta^T J delta) / 2)``."""
    delta = np.atleast_1d(np.asarray(delta, float))
    quad = float(delta @ fisher.information @ delta)
    return float(q_function(0.5 * np.sqrt(max(quad, 0.0))))


def _logdet_pd(R):
    try:
        c = np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("matrix is not positive definite") from exc
    return 2.0 * np.sum(np.log(np.abs(np.diag(c))))


def mu_exact(p, R0, R1, T) -> float:
    """Semi-invariant moment generating function of the Gaussian LRT.

    ``T [p ln|R0| + (1-p) ln|R1| - ln|p R0 + (1-p) R1|]``, never positive.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    mix = p * R0 + (1 - p) * R1
    return float(T * (p * _logdet_pd(R0) + (1 - p) * _logdet_pd(R1) - _logdet_pd(mix)))


def mu_second_derivative_exact(R0, R1, T) -> float:
    """``d^2 mu / dp^2`` at ``p = 1/2``: ``4T Tr((R0+R1)^-1 (R0-R1))^2``."""
    Rp = R0 + R1
    _logdet_pd(Rp)
    G = np.linalg.solve(Rp, R0 - R1)
    return float(4 * T * np.trace(G @ G).real)


def pmin_lower_bound_exact(R0, R1, T) -> float:
    """Lower bound on the minimum error probability of the equal-prior test."""
    mu = mu_exact(0.5, R0, R1, T)
    d2 = max(mu_second_derivative_exact(R0, R1, T), 0.0)
    log_q = special.log_ndtr(-0.5 * np.sqrt(d2))
    return float(np.exp(mu + d2 / 8.0 + log_q))


def h_tilde(fisher: FisherMatrix, zeta, M, T, eta1, beta, eta_incoherent=()) -> float:
    """Integration threshold separating the small- and large-error regimes.

    Capped at ``sqrt(K) zeta``, the largest shift the prior support allows.
    """
    K = fisher.num_sources
    ones_q = fisher.ones_quadratic
    if not np.isfinite(ones_q) or ones_q <= 0:
        raise np.linalg.LinAlgError("1^T J^-1 1 must be positive and finite")
    free = np.sqrt(8.0 * T * ones_q / K * saturation_level(M, eta1, beta, eta_incoherent))
    return float(min(free, np.sqrt(K) * zeta))


def u_tilde(h, fisher: FisherMatrix) -> float:
    return float(fisher.num_sources * h**2 / (8.0 * fisher.ones_quadratic))


def order_statistic_variance(K: int, k: int, zeta) -> float:
    """Variance of the k-th smallest of K i.i.d. uniforms on an interval of width zeta."""
    if not 1 <= k <= K:
        raise ValueError(f"order index k={k} outside [1, {K}]")
    return zeta**2 * (K + 1 - k) * k / ((K + 1) ** 2 * (K + 2))


def mse_scale_factor(K: int) -> float:
    """Ratio of ordered to unordered prior variance, ``2 / (K+1)``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return 2.0 / (K + 1)


def apb(K: int, zeta) -> float:
    """A-priori bound ``K zeta^2 / ((K+1)^2 (K+2))``."""
    if K < 1 or zeta <= 0:
        raise ValueError("apb requires K >= 1 and zeta > 0")
    return K * zeta**2 / ((K + 1) ** 2 * (K + 2))


@dataclass(frozen=True)
class BoundInputs:
    """Everything the closed-form bound needs at one DOA configuration.

    ``snr`` is ``[eta_1, eta_{L+1}, ..., eta_K]``; ``fisher`` may be None when
    the Fisher information was degenerate.
    """

    num_sensors: int
    snapshots: int
    snr: np.ndarray
    beta: np.ndarray
    prior_width: float
    fisher: FisherMatrix | None
    num_sources: int = field(default=0)

    def __post_init__(self):
        snr = np.atleast_1d(np.asarray(self.snr, float))
        beta = np.atleast_1d(np.asarray(self.beta, complex))
        if self.prior_width <= 0:
            raise ValueError("prior width must be positive")
        if np.any(snr < 0):
            raise ValueError("SNRs must be non-negative")
        if beta[0] != 1:
            raise ValueError("beta[0] must equal 1")
        K = beta.size + snr.size - 1
        if self.fisher is not None and self.fisher.num_sources != K:
            raise ValueError("fisher block size does not match the source count")
        object.__setattr__(self, "snr", snr)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "num_sources", K)


@dataclass(frozen=True)
class BoundValue:
    zzb: float
    zzb_generalized: float
    crb: float
    apb: float
    coef_pl: float
    coef_gamma: float
    h_tilde: float
    u_tilde: float
    degenerate: bool = False


def zzb(inputs: BoundInputs) -> BoundValue:
    """Evaluate the ordered-DOA ZZB together with its ingredients.

    With degenerate Fisher information only the a-priori term is kept:
    ``crb``, ``h_tilde`` and ``u_tilde`` are NaN and ``degenerate`` is set.
    """
    K, zeta = inputs.num_sources, inputs.prior_width
    M, T = inputs.num_sensors, inputs.snapshots
    eta1, eta_inc = inputs.snr[0], inputs.snr[1:]
    pl = p_large(M, T, eta1, inputs.beta, eta_inc)
    prior_term = 2.0 * pl * apb(K, zeta)
    prior_trace = K * zeta**2 / 12.0
    generalized_prior_term = 12.0 * pl * prior_trace / ((K + 1) * (K + 2))
    if inputs.fisher is None:
        nan = float("nan")
        return BoundValue(prior_term, generalized_prior_term, nan, apb(K, zeta),
                          2.0 * pl, 0.0, nan, nan, degenerate=True)
    h = h_tilde(inputs.fisher, zeta, M, T, eta1, inputs.beta, eta_inc)
    u = u_tilde(h, inputs.fisher)
    g = float(gamma_3_2(u))
    crb = inputs.fisher.crb
    return BoundValue(
        zzb=prior_term + g * crb,
        zzb_generalized=generalized_prior_term + g * crb,
        crb=crb,
        apb=apb(K, zeta),
        coef_pl=2.0 * pl,
        coef_gamma=g,
        h_tilde=h,
        u_tilde=u,
    )
