"""
The binary test behind the bound
================================

The bound is built from the error probability of deciding between DOA
vectors theta and theta + delta. Here the exact Chernoff quantities are
compared with their small-shift and saturated approximations, and the
closed-form lower bound on the error probability with a direct simulation.
"""

import numpy as np

from zzbdoa import (
    SourceEnsemble,
    fim_trace_form,
    min_error_probability_mc,
    mu_exact,
    mu_second_derivative_exact,
    observation_covariance,
    pmin_lower_bound_exact,
    saturation_level,
    ula,
)

M, T = 20, 40
geom, ens, theta = ula(M), SourceEnsemble(1), np.array([0.2])
J = fim_trace_form(geom, ens, theta, T)[0, 0]
R0 = observation_covariance(geom, ens, theta)
sat = saturation_level(M, 1.0, [1.0])

print("  delta     mu(1/2)   -dJd/8   sat.mu    mu''      dJd      8T*S")
for delta in (1e-4, 5e-4, 2e-3, 0.02, 0.3):
    R1 = observation_covariance(geom, ens, theta + delta)
    q = delta * J * delta
    print(f"{delta:7.4f} {mu_exact(0.5, R0, R1, T):9.4f} {-q / 8:9.4f} {T * np.log1p(-sat):9.4f}"
          f" {mu_second_derivative_exact(R0, R1, T):9.3f} {q:9.3f} {8 * T * sat:8.2f}")

# lower bound vs simulated minimum error probability on a small problem
small = ula(4)
e = SourceEnsemble(1)
R0 = observation_covariance(small, e, [0.0])
print("\n delta   bound    simulated (+- s.e.)")
for delta in (0.05, 0.2, 0.5, 1.0):
    R1 = observation_covariance(small, e, [delta])
    p, se = min_error_probability_mc(R0, R1, 0.5, 2, 10**5, seed=1)
    print(f"{delta:5.2f}  {pmin_lower_bound_exact(R0, R1, 2):.4f}   {p:.4f} +- {se:.4f}")
