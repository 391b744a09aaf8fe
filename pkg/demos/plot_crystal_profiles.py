"""
Postselected beam profiles behind the crystal
=============================================

The birefringent crystal shifts the two polarization components of a
Gaussian beam by +-eps.  After the polarizer only their interference is
seen.  For small eps the ratio of perturbed to unperturbed profile is a
straight line whose slope is Re S_w (position plane) or Im S_w (Fourier
plane); for larger eps the line bends.
"""

import numpy as np

from weakwave.crystal import CrystalSetup, Plane, centroid, perturbed_density, ratio_profile

setup = CrystalSetup(epsilon=0.0)
print(f"postselected fraction without crystal: {perturbed_density(setup).total:.4f}")

###############################################################################
# Ratio of perturbed to unperturbed density, compared with the linear model.
for eps in (0.01, 0.1, 0.5, 1.0):
    r = ratio_profile(setup.replace(epsilon=eps))
    near = np.abs(r.axis) <= 2
    gap = np.max(np.abs(r.exact[near] - r.first_order[near]))
    print(f"eps = {eps:<5}  max |exact - linear| over |x| <= 2: {gap:.3e}")

###############################################################################
# Centroids: the displacement is magnified by Re S_w in position and
# by Im S_w / 2 in momentum (unit beam width).
eps = 1e-3
pos = centroid(setup.replace(epsilon=eps))
mom = centroid(setup.replace(epsilon=eps, plane=Plane.FOURIER))
print(f"position centroid / eps = {pos / eps:.4f}")
print(f"momentum centroid * 2 / eps = {2 * mom / eps:.4f}")
