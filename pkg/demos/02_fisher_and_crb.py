"""
Fisher information and the Cramer-Rao bound
===========================================

The Fisher matrix covers the DOAs plus all source powers and the noise power.
The CRB is the leading K x K block of its inverse.
"""

import numpy as np

from zzbdoa import (
    DegenerateGeometryError,
    SourceEnsemble,
    coprime,
    crb_matrix,
    fim_trace_form,
    fim_vec_form,
    ula,
)

geom = ula(20)
thetas = np.deg2rad([-20.0, 5.0, 30.0])
ens = SourceEnsemble(3, powers=[1.0, 1.0, 1.0])

# the trace and vectorised forms are the same quadratic form
for snr in (-10.0, 10.0):
    e = ens.with_snr_db(snr)
    Jt = fim_trace_form(geom, e, thetas, 40)
    Jv = fim_vec_form(geom, e, thetas, 40)
    print(f"SNR {snr:+.0f} dB: |Jt - Jv| / |Jt| = {np.abs(Jt - Jv).max() / np.abs(Jt).max():.1e}")

# CRB in degrees across SNR; at high SNR it falls by 10 dB per decade
print("\nSNR (dB)   CRB RMSE (deg)")
for snr in range(-20, 31, 10):
    fm = crb_matrix(geom, ens.with_snr_db(snr), thetas, 40)
    print(f"{snr:8d}   {np.rad2deg(np.sqrt(fm.crb)):.5f}")

# more sources than sensors: fine on the coprime array, singular on a ULA
ens11 = SourceEnsemble(11, powers=np.ones(11))
th11 = np.deg2rad(np.linspace(-55, 55, 11))
fm = crb_matrix(coprime(3, 5), ens11, th11, 40)
print(f"\ncoprime(3,5), K=11: method={fm.method}, CRB RMSE={np.rad2deg(np.sqrt(fm.crb)):.3f} deg")
try:
    crb_matrix(ula(10), ens11, th11, 40)
except DegenerateGeometryError as exc:
    print("ula(10), K=11:", exc)
