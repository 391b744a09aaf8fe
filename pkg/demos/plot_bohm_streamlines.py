"""
Bohmian momentum of a two-slit profile
======================================

The real part of the momentum weak value at pixel x is the local phase
gradient of the beam.  For two Gaussian slits leaning towards each other
the field is odd in x, and streamlines that follow it converge on the
centre line without crossing.
"""

import numpy as np

from weakwave.cli import streamlines
from weakwave.pointer import bohm_momentum, two_slit

slit = two_slit(separation=10.0, sigma=1.0, tilt=1.0)
xs = np.linspace(-8, 8, 9)
for x, p in zip(xs, bohm_momentum(slit, xs)):
    print(f"x = {x:5.1f}  p_B = {p:+.4f}")

###############################################################################
# Integrate a handful of streamlines forward.
zs, paths = streamlines(slit, [-6.0, -5.0, -4.0, 4.0, 5.0, 6.0], z_max=4.0)
print("x(z = 4):", np.round(paths[-1], 3))
