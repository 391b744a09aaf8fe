"""Weak-value amplification: estimators, sweeps, Fisher score and photon sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from . import rng
from .crystal import (
    CrystalSetup,
    Plane,
    density_at,
    perturbed_density,
    postselection_probability,
)
from .errors import DegenerateAmplifier, ZeroDensity
from .qcore import STOKES, HermitianObservable, inner, matrix_element, postselection_state, preselection_state
from .weakval import ORTHOGONALITY_THRESHOLD

DENSITY_FLOOR = 1e-15


@dataclass(frozen=True)
class SweepResult:
    """Weak value and postselection probability along a parameter sweep.

    Rows at dark ports carry NaN in the weak-value columns; :attr:`rows`
    reports them as ``None``.
    """

    parameter_name: str
    param: np.ndarray
    re_wv: np.ndarray
    im_wv: np.ndarray
    postselect_prob: np.ndarray

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.re_wv)

    @property
    def rows(self):
        out = []
        for t, re, im, p in zip(self.param, self.re_wv, self.im_wv, self.postselect_prob):
            if np.isnan(re):
                out.append((float(t), None, None, float(p)))
            else:
                out.append((float(t), float(re), float(im), float(p)))
        return out


def sweep_theta(phi: float, theta_range=(0.0, 2 * math.pi, 2001), A: HermitianObservable = STOKES,
                endpoint: bool = True) -> SweepResult:
    """Weak value of ``A`` and ``P(theta)`` as the postselection polarizer turns."""
    lo, hi, steps = theta_range
    if steps < 2:
        raise ValueError("a sweep needs at least two steps")
    thetas = np.linspace(lo, hi, int(steps), endpoint=endpoint)
    i = preselection_state(phi)
    re = np.full(thetas.shape, np.nan)
    im = np.full(thetas.shape, np.nan)
    prob = np.empty(thetas.shape)
    for k, theta in enumerate(thetas):
        f = postselection_state(theta)
        overlap = inner(f, i)
        prob[k] = abs(overlap) ** 2
        if prob[k] > ORTHOGONALITY_THRESHOLD:
            w = matrix_element(f, A, i) / overlap
            re[k], im[k] = w.real, w.imag
    return SweepResult("theta", thetas, re, im, prob)


def estimate_epsilon(measured_centroid: float, S_w: complex, plane: Plane | str = Plane.POSITION,
                     sigma: float = 1.0, hbar: float = 1.0) -> float:
    """Invert the linear centroid response for the displacement.

    Position plane: ``centroid = eps Re S_w``.  Fourier plane:
    ``centroid = eps hbar Im S_w / (2 sigma^2)``.
    """
    S_w = complex(S_w)
    if Plane(plane) is Plane.POSITION:
        if abs(S_w.real) <= 1e-12:
            raise DegenerateAmplifier("Re S_w vanishes; the position centroid carries no signal")
        return measured_centroid / S_w.real
    if abs(S_w.imag) <= 1e-12:
        raise DegenerateAmplifier("Im S_w vanishes; the momentum centroid carries no signal")
    return measured_centroid * 2 * sigma**2 / (hbar * S_w.imag)


def snr_identity_check(phi: float, theta: float) -> tuple[float, float]:
    """``(P |S_w|^2, |<f|S|i>|^2)``; the two agree identically.

    The left side is the amplified signal squared times the detection rate,
    so larger amplification is paid for exactly by fewer detections.  Near
    a dark port the left side stays finite: it tends to ``|<f|S|i>|^2``.
    """
    i, f = preselection_state(phi), postselection_state(theta)
    overlap = inner(f, i)
    numerator = matrix_element(f, STOKES, i)
    rhs = abs(numerator) ** 2
    prob = abs(overlap) ** 2
    # Exact orthogonality: P |S_w|^2 is 0 * inf; take the continuous extension.
    lhs = rhs if prob == 0 else prob * abs(numerator / overlap) ** 2
    return float(lhs), float(rhs)


def _score_step(epsilon: float) -> float:
    return max(1e-6, epsilon * 1e-4)


def fisher_score(setup: CrystalSetup, pixel):
    """``d/d eps ln P_eps(pixel | f)`` by a central difference.

    The conditional density uses the closed-form postselection probability
    as normalizer.  Step: ``max(1e-6, 1e-4 eps)``.
    """
    pixel = np.asarray(pixel, dtype=float)
    if np.any(density_at(setup, pixel) <= DENSITY_FLOOR):
        raise ZeroDensity("score undefined where the postselected density vanishes")
    h = _score_step(setup.epsilon)
    eps = setup.epsilon
    up = np.log(density_at(setup, pixel, eps + h)) - math.log(postselection_probability(setup, eps + h))
    down = np.log(density_at(setup, pixel, eps - h)) - math.log(postselection_probability(setup, eps - h))
    out = (up - down) / (2 * h)
    return float(out) if np.ndim(out) == 0 else out


def fisher_information(setup: CrystalSetup) -> float:
    """``integral score^2 P_eps(xi | f) dxi`` on the setup grid.

    Pixels whose density is below 1e-15 are dropped; their contribution is
    far below the finite-difference error.
    """
    axis = setup.grid.axis()
    dens = density_at(setup, axis)
    keep = dens > DENSITY_FLOOR
    integrand = np.zeros_like(axis)
    integrand[keep] = fisher_score(setup, axis[keep]) ** 2 * dens[keep]
    return float(simpson(integrand, x=axis) / postselection_probability(setup))


@dataclass(frozen=True)
class PhotonSample:
    positions: np.ndarray
    seed: int
    n_requested: int
    n_detected: int

    def __post_init__(self):
        if self.n_detected != len(self.positions) or self.n_detected > self.n_requested:
            raise ValueError("inconsistent photon counts")

    def mean(self) -> float:
        return float(np.mean(self.positions)) if self.n_detected else float("nan")

    def standard_error(self) -> float:
        if self.n_detected < 2:
            return float("nan")
        return float(np.std(self.positions, ddof=1) / math.sqrt(self.n_detected))


SURVIVAL_STREAM = 0
POSITION_STREAM = 1


def sample_photons(setup: CrystalSetup, n: int, seed: int, workers: int | None = None) -> PhotonSample:
    """Simulate ``n`` photons hitting the polarizer and the detector.

    Photon ``k`` survives postselection when its survival draw is below the
    postselected total; a survivor's coordinate is its position draw pushed
    through the inverse of the piecewise-linear CDF of the conditioned
    density.  Both draws are keyed by ``(seed, k)`` only.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    dens = perturbed_density(setup)
    total = min(max(dens.total, 0.0), 1.0)
    survive = rng.uniforms(seed, SURVIVAL_STREAM, 0, n, workers) < total
    n_det = int(np.count_nonzero(survive))
    if n_det == 0:
        return PhotonSample(np.empty(0), seed, n, 0)
    cdf = cumulative_trapezoid(dens.values, dens.axis, initial=0.0)
    cdf /= cdf[-1]
    # Flat CDF runs (underflowed tails) are never selected: a continuous draw
    # lands on a strictly rising segment with probability one.
    u = rng.uniforms(seed, POSITION_STREAM, 0, n, workers)[survive]
    positions = np.interp(u, cdf, dens.axis)
    return PhotonSample(positions, seed, n, n_det)


def centroid_snr(sample: PhotonSample) -> float:
    """Sample mean over its standard error: the per-run signal-to-noise of the centroid."""
    return sample.mean() / sample.standard_error()
