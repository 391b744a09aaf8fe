"""
From weak values to classical averages
======================================

Each pixel x is assigned the value x / eps.  Averaged over all photons this
reproduces <S> exactly.  Averaged over postselected photons it gives Re S_w
when eps is small (possibly far outside [-1, 1]) and the classical
conditioned average once the two shifted beams stop overlapping.
"""

import numpy as np

from weakwave.condavg import generalized_average, interpolation_sweep
from weakwave.qcore import Ket, STOKES, expectation

psi = Ket([np.cos(0.3), np.sin(0.3)])
print(f"unconditioned average: {generalized_average(psi, None, 0.7):.10f}  <S> = {expectation(STOKES, psi):.10f}")

table = interpolation_sweep(phi=0.1, theta_range=(0.0, 2 * np.pi, 2001), epsilons=(0.1, 0.5, 1.0, 2.0, 5.0))

###############################################################################
# Largest excursion of the conditioned average for each displacement.
for k, eps in enumerate(table.epsilons):
    print(f"eps = {eps:<4}  max |conditioned average| = {np.nanmax(np.abs(table.cond_avg[:, k])):.3f}")
print(f"classical curve stays within {np.nanmax(np.abs(table.classical)):.3f}")
