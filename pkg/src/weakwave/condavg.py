"""Generalized eigenvalues and conditioned averages of the Stokes operator.

Without a polarizer, pixel ``x`` fires with probability ``<i|P_x|i>`` where

    P_x = |psi(x - eps)|^2 |H><H| + |psi(x + eps)|^2 |V><V|.

Assigning the value ``x / eps`` to each pixel reproduces ``<S>`` on
average for every state, i.e. ``integral (x/eps) P_x dx = S``.  With a
polarizer the same assignment, averaged over the postselected (coherent)
density, gives Re S_w for small ``eps`` and the classical conditioned
average for large ``eps``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .crystal import CrystalSetup, GridSpec, Plane, branch_weights, default_grid, perturbed_density
from .errors import NonCenteredProfile, ZeroPostselectedIntensity
from .pointer import TransverseProfile, gaussian, psi_x
from .qcore import STOKES, Ket, inner, matrix_element, postselection_state, preselection_state
from .weakval import ORTHOGONALITY_THRESHOLD

CENTERING_TOL = 1e-10
INTENSITY_FLOOR = 1e-15


class AssignmentKind(str, enum.Enum):
    GENERALIZED_POSITION = "generalized_position"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ValueAssignment:
    """Value given to each detector pixel.

    ``GENERALIZED_POSITION`` assigns ``x / epsilon``.  ``CUSTOM`` takes
    ``table``: either a callable of the pixel coordinates or an array of
    values on the integration grid.
    """

    kind: AssignmentKind = AssignmentKind.GENERALIZED_POSITION
    epsilon: float | None = None
    table: object = None

    def __post_init__(self):
        kind = AssignmentKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is AssignmentKind.GENERALIZED_POSITION:
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError("x/epsilon needs epsilon > 0")
        elif self.table is None:
            raise ValueError("a custom assignment needs a table")

    @classmethod
    def generalized_position(cls, epsilon: float) -> "ValueAssignment":
        return cls(AssignmentKind.GENERALIZED_POSITION, epsilon=epsilon)

    @classmethod
    def custom(cls, table) -> "ValueAssignment":
        return cls(AssignmentKind.CUSTOM, table=table)

    def values(self, axis: np.ndarray) -> np.ndarray:
        if self.kind is AssignmentKind.GENERALIZED_POSITION:
            return axis / self.epsilon
        vals = self.table(axis) if callable(self.table) else self.table
        vals = np.broadcast_to(np.asarray(vals, dtype=float), axis.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("custom assignment must be finite on the grid")
        return vals


@dataclass(frozen=True)
class ProbabilityOperator:
    x: float
    matrix: np.ndarray


def _grid(profile: TransverseProfile, epsilon: float, grid: GridSpec | None) -> np.ndarray:
    return (grid or default_grid(profile, epsilon, Plane.POSITION)).axis()


def _shifted_densities(profile: TransverseProfile, epsilon: float, x):
    return np.abs(psi_x(profile, x - epsilon)) ** 2, np.abs(psi_x(profile, x + epsilon)) ** 2


def probability_operator(profile: TransverseProfile, epsilon: float, x: float) -> ProbabilityOperator:
    """Diagonal operator whose expectation is the unpolarized pixel probability at ``x``."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    h, v = _shifted_densities(profile, epsilon, float(x))
    return ProbabilityOperator(float(x), np.diag([h, v]).astype(complex))


def pixel_probability(i: Ket, profile: TransverseProfile, epsilon: float, x):
    """``<i|P_x|i>``: the pixel density summed over both polarizer outcomes."""
    h, v = _shifted_densities(profile, epsilon, np.asarray(x, dtype=float))
    a = np.abs(i.amplitudes) ** 2
    out = a[0] * h + a[1] * v
    return float(out) if np.ndim(out) == 0 else out


def check_centered(profile: TransverseProfile, grid: GridSpec | None = None) -> None:
    axis = _grid(profile, 0.0, grid)
    mean = simpson(axis * np.abs(psi_x(profile, axis)) ** 2, x=axis)
    if abs(mean) >= CENTERING_TOL:
        raise NonCenteredProfile(f"profile mean position {mean:.3e} is not zero")


def generalized_average(i: Ket, profile: TransverseProfile | None, epsilon: float,
                        grid: GridSpec | None = None) -> float:
    """Quadrature of ``(x / eps) P_eps(x)``; equals ``<i|S|i>`` for a centred profile."""
    profile = profile or gaussian()
    if not epsilon > 0:
        raise ValueError("generalized eigenvalues x/epsilon need epsilon > 0")
    check_centered(profile, grid)
    axis = _grid(profile, epsilon, grid)
    return float(simpson(axis / epsilon * pixel_probability(i, profile, epsilon, axis), x=axis))


def operator_identity_residual(profile: TransverseProfile | None, epsilon: float,
                               assignment: ValueAssignment | None = None,
                               grid: GridSpec | None = None) -> float:
    """Max-entry distance between ``integral alpha(x) P_x dx`` and ``S``."""
    profile = profile or gaussian()
    assignment = assignment or ValueAssignment.generalized_position(epsilon)
    axis = _grid(profile, epsilon, grid)
    alpha = assignment.values(axis)
    h, v = _shifted_densities(profile, epsilon, axis)
    integrated = np.diag([simpson(alpha * h, x=axis), simpson(alpha * v, x=axis)])
    return float(np.max(np.abs(integrated - STOKES.matrix)))


def conditioned_average(i: Ket, f: Ket, profile: TransverseProfile | None, epsilon: float,
                        grid: GridSpec | None = None) -> float:
    """Average of ``x / eps`` over the coherent postselected density, renormalized."""
    profile = profile or gaussian()
    if not epsilon > 0:
        raise ValueError("generalized eigenvalues x/epsilon need epsilon > 0")
    setup = CrystalSetup(epsilon=epsilon, preselect=i, postselect=f, profile=profile, grid=grid)
    dens = perturbed_density(setup)
    if dens.total <= INTENSITY_FLOOR:
        raise ZeroPostselectedIntensity(f"postselected probability {dens.total:.3e} is zero")
    return float(simpson(dens.axis / epsilon * dens.values, x=dens.axis) / dens.total)


def classical_average(i: Ket, f: Ket) -> float:
    """Conditioned average of the eigenvalues +-1 once the two paths no longer interfere."""
    a_h, a_v = (abs(w) ** 2 for w in branch_weights(CrystalSetup(preselect=i, postselect=f)))
    return (a_h - a_v) / (a_h + a_v)


@dataclass(frozen=True)
class InterpolationTable:
    """Conditioned averages over ``theta`` (rows) and ``epsilon`` (columns).

    Missing entries (dark ports) are NaN.
    """

    theta: np.ndarray
    epsilons: np.ndarray
    cond_avg: np.ndarray
    re_sw: np.ndarray
    classical: np.ndarray

    def rows(self):
        """Long format ``(theta, eps, cond_avg, re_sw, classical)`` with ``None`` for NaN."""
        def opt(v):
            return None if np.isnan(v) else float(v)

        out = []
        for k, eps in enumerate(self.epsilons):
            for j, theta in enumerate(self.theta):
                out.append((float(theta), float(eps), opt(self.cond_avg[j, k]),
                            opt(self.re_sw[j]), opt(self.classical[j])))
        return out


def interpolation_sweep(i: Ket | None = None, phi: float = 0.1,
                        theta_range=(0.0, 2 * math.pi, 2001),
                        epsilons=(0.1, 0.5, 1.0, 2.0, 5.0),
                        profile: TransverseProfile | None = None,
                        endpoint: bool = True) -> InterpolationTable:
    """Conditioned average versus polarizer angle for several displacements.

    ``i`` defaults to the elliptical preselection with phase ``phi``.  The
    postselected density is quadratic in the two branch weights, so per
    ``epsilon`` only three norms and three first moments are integrated;
    every angle then costs a few multiplications.
    """
    profile = profile or gaussian()
    i = preselection_state(phi) if i is None else i
    lo, hi, steps = theta_range
    thetas = np.linspace(lo, hi, int(steps), endpoint=endpoint)
    eps_arr = np.asarray(epsilons, dtype=float)
    if np.any(eps_arr <= 0):
        raise ValueError("epsilons must be positive")

    finals = [postselection_state(t) for t in thetas]
    weights = np.array([branch_weights(CrystalSetup(preselect=i, postselect=f)) for f in finals])
    a_h, a_v = weights[:, 0], weights[:, 1]

    re_sw = np.full(thetas.shape, np.nan)
    for j, f in enumerate(finals):
        overlap = inner(f, i)
        if abs(overlap) ** 2 > ORTHOGONALITY_THRESHOLD:
            re_sw[j] = (matrix_element(f, STOKES, i) / overlap).real
    with np.errstate(invalid="ignore", divide="ignore"):
        classical = (np.abs(a_h) ** 2 - np.abs(a_v) ** 2) / (np.abs(a_h) ** 2 + np.abs(a_v) ** 2)

    cond = np.full((thetas.size, eps_arr.size), np.nan)
    for k, eps in enumerate(eps_arr):
        axis = _grid(profile, eps, None)
        minus, plus = psi_x(profile, axis - eps), psi_x(profile, axis + eps)

        def moments(weight):
            return (simpson(weight * np.abs(minus) ** 2, x=axis),
                    simpson(weight * np.abs(plus) ** 2, x=axis),
                    simpson(weight * np.conj(minus) * plus, x=axis))

        n_mm, n_pp, n_mp = moments(1.0)
        m_mm, m_pp, m_mp = moments(axis / eps)
        norm = np.abs(a_h) ** 2 * n_mm + np.abs(a_v) ** 2 * n_pp + 2 * np.real(np.conj(a_h) * a_v * n_mp)
        first = np.abs(a_h) ** 2 * m_mm + np.abs(a_v) ** 2 * m_pp + 2 * np.real(np.conj(a_h) * a_v * m_mp)
        ok = norm > INTENSITY_FLOOR
        cond[ok, k] = first[ok] / norm[ok]
    return InterpolationTable(thetas, eps_arr, cond, re_sw, classical)
