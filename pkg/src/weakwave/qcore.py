"""Finite-dimensional states and observables.

Kets and observables are small immutable wrappers around numpy arrays.
Constructors normalize (kets) or check hermiticity (observables) once, so
every downstream function may assume those invariants.

Polarization conventions: ``|H> = (1, 0)``, ``|V> = (0, 1)`` and the
Stokes operator ``S = |H><H| - |V><V|``.  Poincare coordinates use
``s1 = <S>``, ``s2 = 2 Re(a* b)``, ``s3 = 2 Im(a* b)`` for ``a|H> + b|V>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroVector

HERMITIAN_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Ket:
    """Normalized complex state vector.

    The amplitudes are copied, normalized and made read-only.  A zero (or
    non-finite) input raises :class:`ZeroVector`.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes):
        arr = np.array(amplitudes, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise ZeroVector("a ket needs at least one amplitude")
        if not np.all(np.isfinite(arr)):
            raise ZeroVector("amplitudes must be finite")
        norm = np.linalg.norm(arr)
        if norm == 0.0:
            raise ZeroVector("cannot normalize the zero vector")
        self._amps = _frozen(arr / norm)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._amps.copy()
        return self._amps.astype(dtype)

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self._amps)

    def __getitem__(self, k):
        return self._amps[k]

    def __eq__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self._amps, other._amps)

    def __hash__(self):
        return hash(self._amps.tobytes())

    def __repr__(self):
        body = ", ".join(f"{a.real:.6g}{a.imag:+.6g}j" for a in self._amps)
        return f"Ket([{body}])"


def normalize(amplitudes) -> Ket:
    """Alias for ``Ket(amplitudes)``; kept for readability at call sites."""
    return Ket(amplitudes)


class HermitianObservable:
    """Square complex matrix equal to its conjugate transpose within 1e-12."""

    __slots__ = ("_mat",)

    def __init__(self, matrix):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise ValueError(f"observable must be a non-empty square matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("observable entries must be finite")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        self._mat = _frozen(mat)

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._mat.copy()
        return self._mat.astype(dtype)

    def __repr__(self):
        return f"HermitianObservable({self._mat.tolist()!r})"


@dataclass(frozen=True)
class PolarizationConfig:
    """Ellipticity phase of the preselection and angle of the postselection polarizer."""

    phi: float = 0.1
    theta: float = math.pi / 2 - 0.2

    def __post_init__(self):
        if not (-math.pi <= self.phi <= math.pi):
            raise ValueError(f"phi must lie in [-pi, pi], got {self.phi}")
        if not (0.0 <= self.theta < 2 * math.pi):
            raise ValueError(f"theta must lie in [0, 2pi), got {self.theta}")


@dataclass(frozen=True)
class UnitSystem:
    """Physical scales used only at the I/O boundary.

    Internally every length is in units of ``sigma_unit`` and every
    momentum in units of ``hbar / sigma_unit``.
    """

    hbar: float = 1.0
    sigma_unit: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.sigma_unit > 0):
            raise ValueError("hbar and sigma_unit must be positive")

    def length(self, value):
        return np.asarray(value) * self.sigma_unit

    def momentum(self, value):
        return np.asarray(value) * self.hbar / self.sigma_unit


H = Ket([1, 0])
V = Ket([0, 1])
D = Ket([1, 1])
ANTI = Ket([1, -1])
STOKES = HermitianObservable([[1, 0], [0, -1]])


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimension mismatch: {dims}")


def inner(f: Ket, i: Ket) -> complex:
    """Return ``<f|i>`` (``f`` is conjugated)."""
    _check_dims(f.dim, i.dim)
    return complex(np.vdot(f.amplitudes, i.amplitudes))


def matrix_element(f: Ket, A: HermitianObservable, i: Ket) -> complex:
    _check_dims(f.dim, A.dim, i.dim)
    return complex(np.vdot(f.amplitudes, A.matrix @ i.amplitudes))


def expectation(A: HermitianObservable, psi: Ket) -> float:
    """Return the real number ``<psi|A|psi>``."""
    value = matrix_element(psi, A, psi)
    # Hermitian A and unit psi bound the residual by a few ulps of ||A||.
    scale = max(1.0, float(np.max(np.abs(A.matrix))))
    assert abs(value.imag) < 1e-12 * scale * A.dim, value
    return value.real


def preselection_state(phi: float) -> Ket:
    """Slightly elliptical antidiagonal state ``(|H> - e^{i phi}|V>)/sqrt 2``."""
    return Ket([1.0, -np.exp(1j * phi)])


def postselection_state(theta: float) -> Ket:
    """Linear polarizer state ``cos(theta/2)|H> + sin(theta/2)|V>``."""
    return Ket([math.cos(theta / 2), math.sin(theta / 2)])


def make_preselection(cfg: PolarizationConfig) -> Ket:
    return preselection_state(cfg.phi)


def make_postselection(cfg: PolarizationConfig) -> Ket:
    return postselection_state(cfg.theta)


def poincare_coords(psi: Ket) -> tuple[float, float, float]:
    """Stokes vector ``(s1, s2, s3)`` of a qubit state, with ``s1 = <S>``."""
    if psi.dim != 2:
        raise DimensionMismatch(f"Poincare coordinates need a qubit, got dim {psi.dim}")
    a, b = psi.amplitudes
    cross = np.conj(a) * b
    return (float(abs(a) ** 2 - abs(b) ** 2), float(2 * cross.real), float(2 * cross.imag))
