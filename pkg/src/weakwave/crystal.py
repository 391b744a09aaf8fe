"""Birefringent-crystal experiment: polarization-dependent beam displacement.

The crystal acts as ``exp(-i eps S (x) p / hbar)``, which shifts the
``|H>`` part of the beam by ``+eps`` and the ``|V>`` part by ``-eps``.  That
action is applied in closed form,

    <f|<x| U |i>|psi> = <f|H><H|i> psi(x - eps) + <f|V><V|i> psi(x + eps)
    <f|<p| U |i>|psi> = (<f|H><H|i> e^{-i p eps/hbar} + <f|V><V|i> e^{+i p eps/hbar}) psi~(p)

so the detector grid is only used to integrate densities (composite
Simpson rule).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import NodePoint, OrthogonalPostselection, ZeroPostselectedIntensity
from .pointer import (
    NODE_THRESHOLD,
    TransverseProfile,
    gaussian,
    pointer_weak_value_momentum,
    pointer_weak_value_position,
    psi_p,
    psi_x,
    shift_overlap,
)
from .qcore import STOKES, Ket, PolarizationConfig, inner, make_postselection, make_preselection
from .weakval import ORTHOGONALITY_THRESHOLD, weak_value

DEFAULT_POINTS = 4097
TAIL_WIDTHS = 8.0
INTENSITY_FLOOR = 1e-15


class Plane(str, enum.Enum):
    POSITION = "position"
    FOURIER = "fourier"


@dataclass(frozen=True)
class GridSpec:
    """Symmetric uniform detector grid ``linspace(-half_width, half_width, points)``."""

    half_width: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.points < 64 or self.points % 2 == 0:
            raise ValueError(f"grid needs an odd number of points >= 64, got {self.points}")

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)


def required_half_width(profile: TransverseProfile, epsilon: float, plane: Plane) -> float:
    """Smallest grid half-width keeping every displaced mode 8 widths from the edge."""
    if Plane(plane) is Plane.POSITION:
        return max(abs(m.center) + TAIL_WIDTHS * m.sigma for m in profile.modes) + abs(epsilon)
    return max(
        abs(m.phase_momentum) + TAIL_WIDTHS * profile.hbar / (2 * m.sigma) for m in profile.modes
    ) + abs(epsilon)


def default_grid(profile: TransverseProfile, epsilon: float, plane: Plane = Plane.POSITION,
                 points: int = DEFAULT_POINTS) -> GridSpec:
    return GridSpec(required_half_width(profile, epsilon, plane), points)


@dataclass(frozen=True)
class CrystalSetup:
    """Complete configuration of one crystal measurement.

    ``epsilon`` is the displacement in units of the beam width.  ``tau`` and
    ``v`` are optional bookkeeping; when both are given their product must
    equal ``epsilon``.  A missing grid is replaced by :func:`default_grid`.
    """

    epsilon: float = 0.0
    preselect: Ket = field(default_factory=lambda: make_preselection(PolarizationConfig()))
    postselect: Ket = field(default_factory=lambda: make_postselection(PolarizationConfig()))
    profile: TransverseProfile = field(default_factory=gaussian)
    plane: Plane = Plane.POSITION
    grid: GridSpec | None = None
    tau: float | None = None
    v: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.tau is not None and self.v is not None:
            if abs(self.epsilon - self.tau * self.v) >= 1e-12:
                raise ValueError("epsilon must equal tau * v")
        if self.preselect.dim != 2 or self.postselect.dim != 2:
            raise ValueError("crystal pre/postselection must be polarization qubits")
        object.__setattr__(self, "plane", Plane(self.plane))
        if self.grid is None:
            object.__setattr__(self, "grid", default_grid(self.profile, self.epsilon, self.plane))
        elif self.grid.half_width < required_half_width(self.profile, self.epsilon, self.plane) - 1e-12:
            raise ValueError(
                f"grid half_width {self.grid.half_width} is too small; need at least "
                f"{required_half_width(self.profile, self.epsilon, self.plane):.6g}"
            )

    @classmethod
    def from_times(cls, tau: float, v: float, **kwargs) -> "CrystalSetup":
        return cls(epsilon=tau * v, tau=tau, v=v, **kwargs)

    def replace(self, **changes) -> "CrystalSetup":
        """Copy with changes; the grid is re-derived unless given explicitly."""
        values = {
            "epsilon": self.epsilon, "preselect": self.preselect, "postselect": self.postselect,
            "profile": self.profile, "plane": self.plane, "grid": None,
        }
        values.update(changes)
        return CrystalSetup(**values)

    @property
    def hbar(self) -> float:
        return self.profile.hbar


@dataclass(frozen=True)
class DensityProfile:
    axis: np.ndarray
    values: np.ndarray
    total: float

    def conditioned(self) -> np.ndarray:
        """Density renormalized by the postselected total."""
        if self.total <= INTENSITY_FLOOR:
            raise ZeroPostselectedIntensity(f"postselected probability {self.total:.3e} is zero")
        return self.values / self.total


@dataclass(frozen=True)
class RatioProfile:
    axis: np.ndarray
    exact: np.ndarray
    first_order: np.ndarray

    def rows(self):
        return list(zip(self.axis.tolist(), self.exact.tolist(), self.first_order.tolist()))


def branch_weights(setup: CrystalSetup) -> tuple[complex, complex]:
    """``(<f|H><H|i>, <f|V><V|i>)``: the two polarization paths through the crystal."""
    f, i = setup.postselect.amplitudes, setup.preselect.amplitudes
    return complex(np.conj(f[0]) * i[0]), complex(np.conj(f[1]) * i[1])


def _amplitude(setup: CrystalSetup, axis, epsilon: float, plane: Plane):
    a_h, a_v = branch_weights(setup)
    if plane is Plane.POSITION:
        return a_h * psi_x(setup.profile, axis - epsilon) + a_v * psi_x(setup.profile, axis + epsilon)
    phase = np.exp(-1j * axis * epsilon / setup.hbar)
    return (a_h * phase + a_v * np.conj(phase)) * psi_p(setup.profile, axis)


def joint_amplitude_x(setup: CrystalSetup, x):
    """Postselected amplitude at transverse position ``x`` after the crystal."""
    out = _amplitude(setup, np.asarray(x, dtype=float), setup.epsilon, Plane.POSITION)
    return complex(out) if np.ndim(out) == 0 else out


def joint_amplitude_p(setup: CrystalSetup, p):
    """Postselected amplitude at transverse momentum ``p`` after the crystal."""
    out = _amplitude(setup, np.asarray(p, dtype=float), setup.epsilon, Plane.FOURIER)
    return complex(out) if np.ndim(out) == 0 else out


def density_at(setup: CrystalSetup, axis, epsilon: float | None = None) -> np.ndarray:
    """``|amplitude|^2`` at arbitrary detector coordinates in the setup's plane.

    ``epsilon`` overrides the setup's displacement (any sign), which the
    finite-difference score needs.
    """
    eps = setup.epsilon if epsilon is None else epsilon
    return np.abs(_amplitude(setup, np.asarray(axis, dtype=float), eps, setup.plane)) ** 2


def postselection_probability(setup: CrystalSetup, epsilon: float | None = None) -> float:
    """Closed-form ``|<f|i'>|^2`` summed over every pixel (no quadrature)."""
    eps = setup.epsilon if epsilon is None else epsilon
    a_h, a_v = branch_weights(setup)
    cross = np.conj(a_h) * a_v * shift_overlap(setup.profile, -2 * eps)
    return float(abs(a_h) ** 2 + abs(a_v) ** 2 + 2 * cross.real)


def perturbed_density(setup: CrystalSetup) -> DensityProfile:
    axis = setup.grid.axis()
    values = density_at(setup, axis)
    return DensityProfile(axis=axis, values=values, total=float(simpson(values, x=axis)))


def unperturbed_density(setup: CrystalSetup) -> DensityProfile:
    """Postselected density without the crystal: ``|<f|i>|^2 |psi|^2``."""
    return perturbed_density(setup.replace(epsilon=0.0, grid=setup.grid))


def first_order_correction(setup: CrystalSetup, pixel):
    """Linear-response term ``(2 eps / hbar)(Re S_w Im p_w + Im S_w Re p_w)``.

    ``p_w`` is the pointer weak value of the pixel: ``-i hbar psi'/psi`` in
    the position plane and ``p`` in the Fourier plane.
    """
    sw = weak_value(STOKES, setup.preselect, setup.postselect, 1).value
    if setup.plane is Plane.POSITION:
        pw = pointer_weak_value_position(setup.profile, pixel)
    else:
        amp = psi_p(setup.profile, pixel)
        if np.any(np.abs(amp) <= NODE_THRESHOLD):
            raise NodePoint("momentum amplitude vanishes at a requested pixel")
        pw = pointer_weak_value_momentum(pixel)
    out = 2 * setup.epsilon / setup.hbar * (sw.real * np.imag(pw) + sw.imag * np.real(pw))
    return float(out) if np.ndim(out) == 0 else out


def ratio_profile(setup: CrystalSetup) -> RatioProfile:
    """Exact ``P_eps / P`` and its first-order model on the detector grid.

    Pixels where the pointer amplitude is below the node threshold get NaN
    in both columns.
    """
    overlap = inner(setup.postselect, setup.preselect)
    if abs(overlap) ** 2 <= ORTHOGONALITY_THRESHOLD:
        raise OrthogonalPostselection("ratio undefined: postselection orthogonal to preselection")
    axis = setup.grid.axis()
    perturbed = density_at(setup, axis)
    unperturbed = density_at(setup, axis, epsilon=0.0)
    if setup.plane is Plane.POSITION:
        ok = np.abs(psi_x(setup.profile, axis)) > NODE_THRESHOLD
    else:
        ok = np.abs(psi_p(setup.profile, axis)) > NODE_THRESHOLD
    exact = np.full(axis.shape, np.nan)
    exact[ok] = perturbed[ok] / unperturbed[ok]
    first = np.full(axis.shape, np.nan)
    first[ok] = 1.0 + first_order_correction(setup, axis[ok])
    return RatioProfile(axis=axis, exact=exact, first_order=first)


def centroid(setup: CrystalSetup) -> float:
    """Mean detector coordinate of the postselected (renormalized) density."""
    dens = perturbed_density(setup)
    cond = dens.conditioned()
    return float(simpson(dens.axis * cond, x=dens.axis))
