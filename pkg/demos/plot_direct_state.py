"""
Reading a polarization state off its weak value
===============================================

With the polarizer fixed at the diagonal, one complex weak value fixes the
full polarization state: its components are (1 + S_w)/2 and (1 - S_w)/2 up
to a common factor.  Re S_w comes from the position centroid and Im S_w
from the momentum centroid.
"""

import numpy as np

from weakwave.directstate import reconstruct_exact, reconstruct_via_crystal
from weakwave.qcore import Ket

truth = Ket([np.cos(0.4), np.exp(1j * 0.9) * np.sin(0.4)])

exact = reconstruct_exact(truth)
print(f"exact weak value {exact.s_w:.5f} -> fidelity {exact.fidelity:.15f}")

###############################################################################
# Through the simulated crystal the estimate degrades as eps grows.
for eps in (1e-3, 1e-2, 0.1, 0.5, 1.0):
    rep = reconstruct_via_crystal(truth, eps)
    print(f"eps = {eps:<6}  measured S_w = {rep.s_w:.4f}  infidelity = {1 - rep.fidelity:.2e}")
