"""
Estimating a tiny displacement from photon counts
=================================================

Simulated photons pass the crystal and the polarizer; the mean position of
the survivors is divided by Re S_w to estimate eps.  Raising the weak value
by turning the polarizer increases the shift but lowers the number of
survivors, so the signal-to-noise ratio per photon sent stays put.
"""

import math

from weakwave.crystal import CrystalSetup, centroid
from weakwave.metrology import centroid_snr, estimate_epsilon, sample_photons
from weakwave.qcore import STOKES, postselection_state, preselection_state
from weakwave.weakval import weak_value

eps, n = 0.01, 2_000_000

for delta in (0.1, 0.2, 0.4, 0.8):
    pre, post = preselection_state(0.0), postselection_state(math.pi / 2 - delta)
    setup = CrystalSetup(eps, pre, post)
    s_w = weak_value(STOKES, pre, post).value
    sample = sample_photons(setup, n, seed=42)
    est = estimate_epsilon(sample.mean(), s_w)
    print(f"delta = {delta:.1f}  Re S_w = {s_w.real:6.2f}  detected = {sample.n_detected:7d}  "
          f"eps_hat = {est:.5f}  SNR = {centroid_snr(sample):5.1f}")

###############################################################################
# The quadrature centroid of the last setting is the noiseless answer.
print(f"noiseless estimate at delta = {delta}: {estimate_epsilon(centroid(setup), s_w):.5f}")
