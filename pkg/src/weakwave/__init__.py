"""Simulation of postselected weak measurements with a birefringent crystal.

Modules
-------
qcore        kets, observables and the polarization states of the worked example
weakval      weak values of any order, exact and expanded detection probabilities
pointer      Gaussian transverse profiles, pointer weak values, Bohmian momentum
crystal      exact postselected detector densities, ratios and centroids
metrology    amplification estimators, theta sweeps, Fisher score, photon sampling
directstate  state reconstruction from the Stokes weak value
condavg      generalized eigenvalues and conditioned averages
cli          the ``weakwave`` command
"""

__version__ = "0.1.0"

from .crystal import CrystalSetup, GridSpec, Plane
from .errors import (
    DegenerateAmplifier,
    NodePoint,
    OrthogonalPostselection,
    PhysicsDomainError,
    SmallOverlap,
    ZeroDensity,
    ZeroPostselectedIntensity,
)
from .pointer import GaussianMode, TransverseProfile, gaussian, two_slit
from .qcore import (
    STOKES,
    HermitianObservable,
    Ket,
    PolarizationConfig,
    UnitSystem,
    expectation,
    inner,
    make_postselection,
    make_preselection,
)
from .weakval import weak_value
