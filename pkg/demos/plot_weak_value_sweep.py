"""
Weak value versus polarizer angle
=================================

A diagonal-ish elliptical polarization is prepared and a linear polarizer
is turned through a full circle.  Close to the angle that blocks the beam,
the Stokes weak value grows far beyond the eigenvalue range while the
fraction of photons that make it through collapses.
"""

import math

import numpy as np

from weakwave.metrology import snr_identity_check, sweep_theta

phi = 0.1
sweep = sweep_theta(phi, (0.0, 2 * math.pi, 2001), endpoint=False)

###############################################################################
# The weak value is large exactly where the postselection probability is small.
ok = sweep.present
mag = np.hypot(sweep.re_wv, sweep.im_wv)
k = int(np.nanargmax(np.where(ok, mag, np.nan)))
print(f"largest |S_w| = {mag[k]:.1f} at theta = {sweep.param[k]:.4f} rad, P = {sweep.postselect_prob[k]:.2e}")
print(f"smallest P   = {sweep.postselect_prob.min():.2e}")

###############################################################################
# The working point used throughout: both parts of S_w exceed 1.
theta = math.pi / 2 - 0.2
row = sweep_theta(phi, (theta, theta + 1, 2)).rows[0]
print(f"theta = pi/2 - 0.2:  S_w = {row[1]:.4f} {row[2]:+.4f}i,  P = {row[3]:.4f}")

###############################################################################
# Amplification is paid for in detections: P |S_w|^2 equals |<f|S|i>|^2,
# which is bounded by 1 however small P gets.
for t in (theta, theta + 0.1, theta + 0.15):
    lhs, rhs = snr_identity_check(phi, t)
    print(f"theta = {t:.3f}:  P|S_w|^2 = {lhs:.6f}  |<f|S|i>|^2 = {rhs:.6f}")
