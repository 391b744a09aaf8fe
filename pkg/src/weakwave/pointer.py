"""Transverse beam profiles built from Gaussian modes.

A mode is

    coeff * (2 pi s^2)^(-1/4) * exp(-(x - c)^2 / (4 s^2)) * exp(i p0 x / hbar)

and a :class:`TransverseProfile` is a finite superposition of modes.  The
profile rescales its coefficients on construction so that the position
density integrates to one; the norm is computed from closed-form Gaussian
overlaps, not by quadrature.  Everything else (momentum representation,
derivatives, weak values) is closed form as well.

All functions accept scalar or array ``x`` / ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NodePoint

NODE_THRESHOLD = 1e-15


@dataclass(frozen=True)
class GaussianMode:
    sigma: float = 1.0
    center: float = 0.0
    phase_momentum: float = 0.0
    coeff: complex = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"mode width must be positive, got {self.sigma}")
        if not (np.isfinite(self.center) and np.isfinite(self.phase_momentum) and np.isfinite(self.coeff)):
            raise ValueError("mode parameters must be finite")
        object.__setattr__(self, "coeff", complex(self.coeff))


def _overlap(a: GaussianMode, b: GaussianMode, hbar: float) -> complex:
    """Closed-form integral of conj(mode a) * mode b over the real line, unit coefficients."""
    qa, qb = 1.0 / (4 * a.sigma**2), 1.0 / (4 * b.sigma**2)
    quad = qa + qb
    lin = 2 * qa * a.center + 2 * qb * b.center + 1j * (b.phase_momentum - a.phase_momentum) / hbar
    const = -qa * a.center**2 - qb * b.center**2
    norms = (2 * math.pi * a.sigma**2) ** -0.25 * (2 * math.pi * b.sigma**2) ** -0.25
    return norms * math.sqrt(math.pi / quad) * np.exp(lin**2 / (4 * quad) + const)


@dataclass(frozen=True)
class TransverseProfile:
    """Normalized superposition of :class:`GaussianMode` objects."""

    modes: tuple[GaussianMode, ...]
    hbar: float = 1.0

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ValueError("a profile needs at least one mode")
        norm2 = 0.0
        for a in modes:
            for b in modes:
                norm2 += (np.conj(a.coeff) * b.coeff * _overlap(a, b, self.hbar)).real
        if not norm2 > 0:
            raise ValueError("profile has zero norm")
        scale = 1.0 / math.sqrt(norm2)
        scaled = tuple(
            GaussianMode(m.sigma, m.center, m.phase_momentum, m.coeff * scale) for m in modes
        )
        object.__setattr__(self, "modes", scaled)

    def norm(self) -> float:
        """Analytic ``integral |psi(x)|^2 dx`` of the (already rescaled) profile."""
        total = 0.0
        for a in self.modes:
            for b in self.modes:
                total += (np.conj(a.coeff) * b.coeff * _overlap(a, b, self.hbar)).real
        return total

    def mean_position(self) -> float:
        """Analytic ``<x>``; used to check centering without quadrature."""
        total = 0.0
        for a in self.modes:
            for b in self.modes:
                qa, qb = 1.0 / (4 * a.sigma**2), 1.0 / (4 * b.sigma**2)
                quad = qa + qb
                lin = 2 * qa * a.center + 2 * qb * b.center + 1j * (b.phase_momentum - a.phase_momentum) / self.hbar
                total += (np.conj(a.coeff) * b.coeff * _overlap(a, b, self.hbar) * lin / (2 * quad)).real
        return total

    @property
    def reach(self) -> float:
        """Largest ``|center| + sigma`` over the modes."""
        return max(abs(m.center) + m.sigma for m in self.modes)

    @property
    def max_sigma(self) -> float:
        return max(m.sigma for m in self.modes)

    @property
    def momentum_reach(self) -> float:
        return max(abs(m.phase_momentum) + self.hbar / (2 * m.sigma) for m in self.modes)


def shift_overlap(profile: TransverseProfile, d: float) -> complex:
    """Closed-form ``integral conj(psi(x)) psi(x - d) dx``."""
    total = 0j
    for a in profile.modes:
        for b in profile.modes:
            moved = GaussianMode(b.sigma, b.center + d, b.phase_momentum, 1.0)
            phase = np.exp(-1j * b.phase_momentum * d / profile.hbar)
            total += np.conj(a.coeff) * b.coeff * phase * _overlap(a, moved, profile.hbar)
    return complex(total)


def gaussian(sigma: float = 1.0, center: float = 0.0, phase_momentum: float = 0.0, hbar: float = 1.0) -> TransverseProfile:
    """Single-mode profile; ``gaussian()`` is the unit-width beam centred at the origin."""
    return TransverseProfile((GaussianMode(sigma, center, phase_momentum),), hbar=hbar)


def two_slit(separation: float = 10.0, sigma: float = 1.0, tilt: float = 1.0, hbar: float = 1.0) -> TransverseProfile:
    """Two equal Gaussian slits at ``+-separation/2`` whose waves lean towards each other.

    The slit at ``-separation/2`` carries phase momentum ``+tilt`` and its
    mirror image ``-tilt``, so the profile is even, ``p_B`` is odd and there
    is non-trivial interference.  ``tilt=0`` gives a real profile (``p_B = 0``).
    """
    half = separation / 2
    return TransverseProfile(
        (GaussianMode(sigma, -half, tilt), GaussianMode(sigma, half, -tilt)), hbar=hbar
    )


def _mode_terms(profile: TransverseProfile, x):
    x = np.asarray(x, dtype=float)
    amps = []
    slopes = []
    for m in profile.modes:
        d = x - m.center
        amp = m.coeff * (2 * math.pi * m.sigma**2) ** -0.25 * np.exp(
            -(d**2) / (4 * m.sigma**2) + 1j * m.phase_momentum * x / profile.hbar
        )
        amps.append(amp)
        slopes.append(-d / (2 * m.sigma**2) + 1j * m.phase_momentum / profile.hbar)
    return amps, slopes


def psi_x(profile: TransverseProfile, x):
    """Position amplitude ``<x|psi>``."""
    amps, _ = _mode_terms(profile, x)
    out = sum(amps)
    return complex(out) if np.ndim(out) == 0 else out


def dpsi_x(profile: TransverseProfile, x):
    """Analytic ``d/dx <x|psi>``."""
    amps, slopes = _mode_terms(profile, x)
    out = sum(a * s for a, s in zip(amps, slopes))
    return complex(out) if np.ndim(out) == 0 else out


def psi_p(profile: TransverseProfile, p):
    """Momentum amplitude ``<p|psi>`` with the ``(2 pi hbar)^(-1/2) exp(-i p x / hbar)`` kernel.

    Each mode maps to a Gaussian of width ``hbar / (2 s)`` centred at its
    phase momentum; the position offset becomes a linear phase.
    """
    p = np.asarray(p, dtype=float)
    hbar = profile.hbar
    out = np.zeros(p.shape, dtype=complex)
    for m in profile.modes:
        k = (m.phase_momentum - p) / hbar
        pref = (2 * m.sigma**2 / (math.pi * hbar**2)) ** 0.25
        out = out + m.coeff * pref * np.exp(1j * k * m.center - (k * m.sigma) ** 2)
    return complex(out) if np.ndim(out) == 0 else out


def pointer_weak_value_position(profile: TransverseProfile, x):
    """Momentum weak value ``-i hbar psi'(x) / psi(x)`` for a position pixel.

    Raises :class:`NodePoint` when ``|psi(x)| <= 1e-15`` anywhere in ``x``.
    """
    amps, slopes = _mode_terms(profile, x)
    psi = sum(amps)
    if np.any(np.abs(psi) <= NODE_THRESHOLD):
        raise NodePoint("profile amplitude vanishes at a requested pixel")
    if len(amps) == 1:
        # psi'/psi is just the mode slope; skip the division.
        out = -1j * profile.hbar * np.broadcast_to(slopes[0], np.shape(psi))
    else:
        out = -1j * profile.hbar * sum(a * s for a, s in zip(amps, slopes)) / psi
    return complex(out) if np.ndim(out) == 0 else out


def pointer_weak_value_momentum(p):
    """Momentum weak value for a momentum pixel: ``p`` itself."""
    if np.ndim(p) == 0:
        return complex(float(p))
    return np.asarray(p, dtype=float).astype(complex)


def bohm_momentum(profile: TransverseProfile, x):
    """Phase gradient ``dPhi/dx`` (the real part of the position-pixel momentum weak value)."""
    w = pointer_weak_value_position(profile, x)
    return w.real if np.ndim(w) == 0 else np.real(w)


@dataclass(frozen=True)
class PhaseField:
    grid: np.ndarray
    phi_values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("phase grid must be strictly increasing")

    def gradient(self) -> np.ndarray:
        """Second-order finite-difference ``dPhi/dx`` on the grid."""
        return np.gradient(self.phi_values, self.grid)


def phase_field(profile: TransverseProfile, grid) -> PhaseField:
    """Unwrapped phase ``Phi(x)`` (action units) of ``<x|psi> = |psi| exp(i Phi / hbar)``.

    Unwrapping continues each sample onto the branch nearest its left
    neighbour, so the grid must resolve the phase (steps below pi).
    Points with ``|psi|^2 <= 1e-30`` are reported as NaN.
    """
    grid = np.asarray(grid, dtype=float)
    psi = psi_x(profile, grid)
    phase = np.unwrap(np.angle(psi)) * profile.hbar
    phase = np.where(np.abs(psi) ** 2 > 1e-30, phase, np.nan)
    return PhaseField(grid=grid, phi_values=phase)
