"""Fisher information for the stochastic Gaussian DOA model and the CRB.

The full parameter vector is ``[theta_1..theta_K, sigma_1^2, sigma_{L+1}^2..
sigma_K^2, sigma_n^2]``; the coherent coefficients are treated as known.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .arrays import ArrayGeometry
from .signals import SourceEnsemble, covariance_derivatives, observation_covariance, power_derivatives

TRACE_FORM = "trace_form"
VEC_FORM = "vec_form"
CONDITION_LIMIT = 1e12


class DegenerateGeometryError(np.linalg.LinAlgError):
    """Full-parameter Fisher information is singular or nearly so."""


@dataclass(frozen=True)
class FisherMatrix:
    """DOA block of the inverse full-parameter FIM (the CRB matrix)."""

    theta_block: np.ndarray
    method: str = TRACE_FORM

    @property
    def num_sources(self) -> int:
        return self.theta_block.shape[0]

    @property
    def crb(self) -> float:
        """Average per-source CRB, ``Tr(block) / K`` in rad^2."""
        return float(np.trace(self.theta_block)) / self.num_sources

    @property
    def ones_quadratic(self) -> float:
        """``1^T J^{-1} 1``."""
        return float(self.theta_block.sum())

    @property
    def information(self) -> np.ndarray:
        """Effective DOA information ``J`` (nuisance parameters marginalised)."""
        return np.linalg.inv(self.theta_block)


def _all_derivatives(geom, ens, thetas):
    return np.concatenate(
        [covariance_derivatives(geom, ens, thetas), power_derivatives(geom, ens, thetas)]
    )


def fim_trace_form(geom: ArrayGeometry, ens: SourceEnsemble, thetas, snapshots: int) -> np.ndarray:
    """``J_ij = T Tr(dR_i R^-1 dR_j R^-1)`` over the full parameter vector."""
    R = observation_covariance(geom, ens, thetas)
    D = _all_derivatives(geom, ens, thetas)
    factor = linalg.cho_factor(R)
    M = R.shape[0]
    G = linalg.cho_solve(factor, D.transpose(1, 0, 2).reshape(M, -1))
    G = G.reshape(M, D.shape[0], M).transpose(1, 0, 2)  # G_i = R^-1 dR_i
    J = snapshots * np.einsum("iab,jba->ij", G, G).real
    return 0.5 * (J + J.T)


def fim_vec_form(geom: ArrayGeometry, ens: SourceEnsemble, thetas, snapshots: int) -> np.ndarray:
    """``J_ij = T vec(dR_i)^H (R^T kron R)^-1 vec(dR_j)``.

    Uses ``(R^T kron R)^-1 vec(X) = vec(R^-1 X R^-1)`` so the M^2 x M^2
    Kronecker product is never formed.
    """
    R = observation_covariance(geom, ens, thetas)
    D = _all_derivatives(geom, ens, thetas)
    factor = linalg.cho_factor(R)
    W = np.empty_like(D)
    for j, dR in enumerate(D):
        left = linalg.cho_solve(factor, dR)
        W[j] = linalg.cho_solve(factor, left.conj().T).conj().T
    vecs = D.reshape(D.shape[0], -1)
    J = snapshots * (vecs.conj() @ W.reshape(W.shape[0], -1).T)
    if np.max(np.abs(J.imag)) > 1e-8 * max(np.max(np.abs(J.real)), 1e-300):
        raise np.linalg.LinAlgError("vec-form FIM has a non-negligible imaginary part")
    J = J.real
    return 0.5 * (J + J.T)


def default_method(geom: ArrayGeometry, num_sources: int) -> str:
    return VEC_FORM if num_sources >= geom.num_sensors else TRACE_FORM


def invert_fim(J: np.ndarray, num_sources: int) -> np.ndarray:
    """Leading K x K block of ``J^-1`` with a conditioning guard.

    The guard is applied to the diagonally equilibrated matrix so that the
    mixed units of angles and powers do not trigger it.

    Raises:
        DegenerateGeometryError: condition number above 1e12.
    """
    J = 0.5 * (J + J.T)
    d = np.sqrt(np.diag(J))
    if np.any(~np.isfinite(d)) or np.any(d <= 0):
        raise DegenerateGeometryError("Fisher information has a zero diagonal entry")
    C = J / np.outer(d, d)
    w, V = np.linalg.eigh(C)
    if w[0] <= 0 or w[-1] / w[0] > CONDITION_LIMIT:
        cond = np.inf if w[0] <= 0 else w[-1] / w[0]
        raise DegenerateGeometryError(f"Fisher information is near-singular (cond={cond:.3g})")
    Vk = V[:num_sources] / d[:num_sources, None]
    block = (Vk / w) @ Vk.T
    return 0.5 * (block + block.T)


def crb_matrix(
    geom: ArrayGeometry, ens: SourceEnsemble, thetas, snapshots: int, method: str | None = None
) -> FisherMatrix:
    method = method or default_method(geom, ens.num_sources)
    if method == TRACE_FORM:
        J = fim_trace_form(geom, ens, thetas, snapshots)
    elif method == VEC_FORM:
        J = fim_vec_form(geom, ens, thetas, snapshots)
    else:
        raise ValueError(f"unknown FIM method {method!r}")
    return FisherMatrix(invert_fim(J, ens.num_sources), method)
