"""Sample covariance, grid MUSIC and ordered RMSE."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arrays import ArrayGeometry


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform angular search grid in radians (endpoints included)."""

    start: float
    stop: float
    num_points: int

    def __post_init__(self):
        if not self.start < self.stop:
            raise ValueError("grid start must be below stop")
        if self.num_points < 2:
            raise ValueError("grid needs at least 2 points")
        if self.start <= -np.pi / 2 or self.stop >= np.pi / 2:
            raise ValueError("grid must stay inside (-pi/2, pi/2)")

    @classmethod
    def from_step(cls, start, stop, step):
        n = int(round((stop - start) / step)) + 1
        return cls(float(start), float(stop), max(n, 2))

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.num_points - 1)

    @property
    def angles(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num_points)


@dataclass(frozen=True)
class TrialRecord:
    """Sorted truth and estimate of one trial.

    ``theta_hat_sorted`` is None when no estimator was run.
    """

    theta_true_sorted: np.ndarray
    theta_hat_sorted: np.ndarray | None = None
    degenerate_bound: bool = False

    @property
    def squared_errors(self) -> np.ndarray | None:
        if self.theta_hat_sorted is None:
            return None
        return (self.theta_hat_sorted - self.theta_true_sorted) ** 2


def make_record(theta_true, theta_hat=None, degenerate_bound=False) -> TrialRecord:
    """Build a record, sorting both vectors to remove the label ambiguity."""
    true_sorted = np.sort(np.asarray(theta_true, float))
    hat_sorted = None
    if theta_hat is not None:
        hat_sorted = np.sort(np.asarray(theta_hat, float))
        if hat_sorted.shape != true_sorted.shape:
            raise ValueError("estimate and truth must have the same length")
    return TrialRecord(true_sorted, hat_sorted, degenerate_bound)


def sample_covariance(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("X must be an M x T matrix with T >= 1")
    R = X @ X.conj().T / X.shape[1]
    return 0.5 * (R + R.conj().T)


@lru_cache(maxsize=16)
def _grid_steering(positions: bytes, start: float, stop: float, n: int) -> np.ndarray:
    pos = np.frombuffer(positions, dtype=float)
    angles = np.linspace(start, stop, n)
    return np.exp(-1j * np.pi * np.outer(np.sin(angles), pos))  # n x M


def grid_steering(geom: ArrayGeometry, grid: SpectralGrid) -> np.ndarray:
    """Conjugate-free steering rows, one per grid angle (shape n x M)."""
    return _grid_steering(geom.positions.tobytes(), grid.start, grid.stop, grid.num_points)


def music_null_spectrum(Rhat, K: int, geom: ArrayGeometry, grid: SpectralGrid) -> np.ndarray:
    """``||E_n^H a(theta)||^2`` on the grid, the reciprocal of the MUSIC spectrum."""
    M = geom.num_sensors
    if K >= M:
        raise ValueError(f"MUSIC needs K < M (got K={K}, M={M})")
    _, V = np.linalg.eigh(Rhat)
    Es = V[:, M - K:]
    A = grid_steering(geom, grid)
    # E_n E_n^H = I - E_s E_s^H and ||a||^2 = M
    proj = np.abs(A.conj() @ Es) ** 2
    return np.maximum(M - proj.sum(axis=1), np.finfo(float).tiny)


def music_spectrum(Rhat, K, geom, grid) -> np.ndarray:
    return 1.0 / music_null_spectrum(Rhat, K, geom, grid)


def music_estimate(Rhat, K: int, geom: ArrayGeometry, grid: SpectralGrid) -> np.ndarray:
    """K DOAs (ascending, radians) from the K highest MUSIC peaks.

    Interior peaks are refined with a parabola through the three neighbouring
    samples of the null spectrum; edge peaks are kept as is. With fewer than K peaks, the remaining
    estimates are the grid points of highest spectrum not yet used.
    """
    f = music_null_spectrum(Rhat, K, geom, grid)
    n = f.size
    # a source just outside the support shows up as a one-sided peak at an edge
    padded = np.concatenate([[np.inf], f, [np.inf]])
    peaks = np.flatnonzero((f < padded[:-2]) & (f <= padded[2:]))
    chosen = peaks[np.argsort(f[peaks], kind="stable")[:K]]
    angles = grid.angles
    est = []
    for i in chosen:
        if i == 0 or i == n - 1:
            est.append(angles[i])
            continue
        lo, mid, hi = f[i - 1], f[i], f[i + 1]
        curv = lo - 2 * mid + hi
        offset = 0.5 * (lo - hi) / curv if curv > 0 else 0.0
        est.append(angles[i] + np.clip(offset, -0.5, 0.5) * grid.step)
    if len(chosen) < K:
        taken = set(chosen.tolist())
        for i in np.argsort(f, kind="stable"):
            if len(est) == K:
                break
            if i not in taken:
                taken.add(int(i))
                est.append(angles[i])
    return np.clip(np.sort(np.asarray(est)), grid.start, grid.stop)


def rmse(records) -> float:
    """Root mean squared error in degrees over trials and sources, after ordering."""
    records = list(records)
    if not records:
        raise ValueError("rmse of an empty record set")
    K = records[0].theta_true_sorted.size
    errs = []
    for rec in records:
        if rec.theta_true_sorted.size != K:
            raise ValueError("all records must share the same number of sources")
        se = rec.squared_errors
        if se is None:
            raise ValueError("record has no estimate")
        errs.append(se)
    return float(np.rad2deg(np.sqrt(np.mean(errs))))
