"""
Array geometries and steering vectors
=====================================

Sensor positions are measured in half wavelengths, so the phase of sensor m
for a plane wave from angle theta is ``-pi * d_m * sin(theta)``.
"""

import numpy as np

from zzbdoa import coprime, steering_derivative, steering_matrix, steering_vector, ula

# a 20-sensor ULA with half-wavelength spacing
u = ula(20)
print(u, "last position:", u.positions[-1])

# the (3,5) coprime array: union of {0,3,...,12} and {0,5,...,25}
c = coprime(3, 5)
print(c, "positions:", c.positions.astype(int).tolist())

# its difference coarray is much larger than the physical aperture suggests
lags = np.unique(np.subtract.outer(c.positions, c.positions).ravel()).astype(int)
print("distinct coarray lags:", lags.size, "(physical sensors:", c.num_sensors, ")")

# steering vectors are pure phases
a = steering_vector(ula(2), np.deg2rad(30.0))
print("a(30 deg) on two sensors:", np.round(a, 12))

A = steering_matrix(u, np.deg2rad([10.0, -10.0]))
print("mirror angles give conjugate columns:", np.allclose(A[:, 0], A[:, 1].conj()))

# the analytic derivative against a central difference
theta, h = 0.4, 1e-6
fd = (steering_vector(u, theta + h) - steering_vector(u, theta - h)) / (2 * h)
err = np.max(np.abs(fd - steering_derivative(u, theta)) / np.maximum(np.abs(fd), 1e-300))
print(f"derivative vs finite difference, max rel err: {err:.1e}")
