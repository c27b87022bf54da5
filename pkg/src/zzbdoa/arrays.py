"""Linear array geometries and steering vectors.

Sensor positions are stored in units of half a wavelength, so the phase of
sensor ``m`` for a plane wave from ``theta`` is ``-pi * d_m * sin(theta)``.
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

DUPLICATE_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ArrayGeometry:
    """Sensor positions (half-wavelength units) of a linear array.

    Positions must be strictly increasing, non-negative and start at 0.
    """

    positions: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).ravel()
        if pos.size < 2:
            raise ValueError("an array needs at least 2 sensors")
        if pos[0] != 0.0:
            raise ValueError("first sensor position must be 0")
        if np.any(np.diff(pos) <= 0):
            raise ValueError("sensor positions must be strictly increasing")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def num_sensors(self) -> int:
        return self.positions.size

    def __repr__(self):
        return f"ArrayGeometry(label={self.label!r}, M={self.num_sensors})"


def ula(num_sensors: int, spacing: float = 1.0) -> ArrayGeometry:
    """Uniform linear array with ``spacing`` half-wavelengths between sensors."""
    if num_sensors < 2:
        raise ValueError(f"num_sensors must be >= 2, got {num_sensors}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    return ArrayGeometry(spacing * np.arange(num_sensors, dtype=float), label="ula")


def coprime(m: int, n: int) -> ArrayGeometry:
    """Coprime pair array: n sensors at spacing m plus 2m sensors at spacing n.

    Both subarrays share the sensor at the origin, giving ``2m + n - 1``
    sensors in total.
    """
    if m < 1 or n < 1:
        raise ValueError("coprime integers must be positive")
    if gcd(m, n) != 1:
        raise ValueError(f"({m}, {n}) is not a coprime pair")
    if not m < n:
        raise ValueError(f"coprime pair requires m < n, got ({m}, {n})")
    first = m * np.arange(n)
    second = n * np.arange(2 * m)
    positions = np.union1d(first, second).astype(float)
    return ArrayGeometry(positions, label=f"coprime({m},{n})")


def _check_angles(thetas):
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any(np.abs(thetas) >= np.pi / 2):
        raise ValueError("angles must lie strictly inside (-pi/2, pi/2)")
    return thetas


def steering_vector(geom: ArrayGeometry, theta: float) -> np.ndarray:
    return steering_matrix(geom, [theta])[:, 0]


def steering_matrix(geom: ArrayGeometry, thetas) -> np.ndarray:
    """M x K matrix whose k-th column is the steering vector of ``thetas[k]``.

    Raises:
        ValueError: if two angles coincide (within 1e-12 rad) or leave the
            open interval (-pi/2, pi/2).
    """
    thetas = _check_angles(thetas)
    if thetas.size > 1:
        s = np.sort(thetas)
        if np.any(np.diff(s) <= DUPLICATE_ANGLE_TOL):
            raise ValueError("DOAs must be pairwise distinct")
    return np.exp(-1j * np.pi * np.outer(geom.positions, np.sin(thetas)))


def steering_derivative(geom: ArrayGeometry, theta: float) -> np.ndarray:
    return steering_derivatives(geom, [theta])[:, 0]


def steering_derivatives(geom: ArrayGeometry, thetas) -> np.ndarray:
    """Column-wise d a(theta) / d theta for every angle in ``thetas``."""
    thetas = _check_angles(thetas)
    phase = -1j * np.pi * geom.positions[:, None]
    return phase * np.cos(thetas) * np.exp(phase * np.sin(thetas))
