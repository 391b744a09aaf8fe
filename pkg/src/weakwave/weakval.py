"""Weak values of arbitrary order and the probability corrections they control.

For a generator ``A`` and an intermediate unitary ``exp(-i eps A)`` the
relative change of the detection probability ``|<f|i>|^2`` is

    P_eps / P = 1 + 2 eps Im A_w - eps^2 (Re A2_w - |A_w|^2) + O(eps^3)

where ``An_w = <f|A^n|i> / <f|i>``.  :func:`perturbed_probability` gives the
exact left-hand side, :func:`ratio_series` the truncated right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OrthogonalPostselection
from .qcore import HermitianObservable, Ket, _check_dims, inner

ORTHOGONALITY_THRESHOLD = 1e-12
MAX_GENERATOR_DIM = 16


@dataclass(frozen=True)
class WeakValueResult:
    order: int
    value: complex
    preselect: Ket
    postselect: Ket

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("weak-value order must be >= 1")
        if not np.isfinite(self.value):
            raise ValueError("weak value is not finite")

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __complex__(self):
        return self.value


def check_overlap(f: Ket, i: Ket, threshold: float = ORTHOGONALITY_THRESHOLD) -> complex:
    """Return ``<f|i>``, raising :class:`OrthogonalPostselection` at a dark port."""
    overlap = inner(f, i)
    if abs(overlap) ** 2 <= threshold:
        raise OrthogonalPostselection(
            f"|<f|i>|^2 = {abs(overlap) ** 2:.3e} is below the orthogonality threshold {threshold:g}"
        )
    return overlap


def weak_value(A: HermitianObservable, i: Ket, f: Ket, n: int = 1) -> WeakValueResult:
    """Order-``n`` weak value ``<f|A^n|i> / <f|i>``.

    ``A^n |i>`` is built by repeated application, so no eigendecomposition
    is involved.
    """
    if n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")
    _check_dims(A.dim, i.dim, f.dim)
    overlap = check_overlap(f, i)
    vec = i.amplitudes
    for _ in range(n):
        vec = A.matrix @ vec
    value = complex(np.vdot(f.amplitudes, vec)) / overlap
    return WeakValueResult(order=n, value=value, preselect=i, postselect=f)


def unitary_from_generator(A: HermitianObservable, epsilon: float) -> np.ndarray:
    """``exp(-i epsilon A)`` via the spectral decomposition of ``A``."""
    if A.dim > MAX_GENERATOR_DIM:
        raise ValueError(f"generator dimension {A.dim} exceeds the cap of {MAX_GENERATOR_DIM}")
    evals, evecs = np.linalg.eigh(A.matrix)
    return (evecs * np.exp(-1j * epsilon * evals)) @ evecs.conj().T


def perturbed_probability(A: HermitianObservable, i: Ket, f: Ket, epsilon: float) -> float:
    """Exact ``|<f| exp(-i epsilon A) |i>|^2``."""
    _check_dims(A.dim, i.dim, f.dim)
    U = unitary_from_generator(A, epsilon)
    amp = np.vdot(f.amplitudes, U @ i.amplitudes)
    return float(min(1.0, abs(amp) ** 2))


def ratio_series(A: HermitianObservable, i: Ket, f: Ket, epsilon: float, order: int = 1) -> float:
    """Truncated expansion of ``P_eps / P`` to first or second order in epsilon."""
    if order not in (1, 2):
        raise ValueError("ratio_series supports order 1 or 2 only")
    Aw = weak_value(A, i, f, 1).value
    ratio = 1.0 + 2.0 * epsilon * Aw.imag
    if order == 2:
        A2w = weak_value(A, i, f, 2).value
        ratio -= epsilon**2 * (A2w.real - abs(Aw) ** 2)
    return ratio
