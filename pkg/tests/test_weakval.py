import numpy as np
import pytest

from weakwave.errors import OrthogonalPostselection
from weakwave.qcore import D, STOKES, H, HermitianObservable, Ket, V, expectation, inner
from weakwave.weakval import perturbed_probability, ratio_series, unitary_from_generator, weak_value

from conftest import random_ket
from oracles import loglog_slope, worked_post, worked_pre, random_hermitian, stokes_weak_value_2x2

# Exact Stokes weak value of the worked example, from stokes_weak_value_2x2.
S_W_EXACT = 8.001286702803057 + 3.9405833416544858j


def test_frozen_value_matches_hand_arithmetic():
    assert stokes_weak_value_2x2(worked_pre(), worked_post()) == pytest.approx(S_W_EXACT, abs=1e-14)


def test_weak_value_examples(worked_states):
    i, f = worked_states
    assert weak_value(STOKES, H, H).value == 1
    assert weak_value(STOKES, i, f, 2).value == pytest.approx(1.0, abs=1e-12)
    sw = weak_value(STOKES, i, f).value
    assert abs(sw - S_W_EXACT) < 1e-12
    # Order of magnitude of the quoted "7.5 + 3.2i".
    assert abs(sw.real - 7.5) <= 0.5 * 7.5 and abs(sw.imag - 3.2) <= 0.5 * 3.2


def test_weak_value_rejects_dark_port():
    with pytest.raises(OrthogonalPostselection):
        weak_value(STOKES, H, V)
    with pytest.raises(ValueError):
        weak_value(STOKES, H, H, 0)


def test_higher_orders_by_repeated_application(rng):
    A = HermitianObservable(random_hermitian(rng, 3))
    i, f = random_ket(rng, 3), random_ket(rng, 3)
    for n in range(1, 6):
        direct = np.vdot(f.amplitudes, np.linalg.matrix_power(A.matrix, n) @ i.amplitudes) / inner(f, i)
        assert weak_value(A, i, f, n).value == pytest.approx(direct, rel=1e-12)


def test_unitary_examples(rng):
    assert np.allclose(unitary_from_generator(STOKES, 0.0), np.eye(2))
    eps = 0.37
    assert np.allclose(unitary_from_generator(STOKES, eps), np.diag([np.exp(-1j * eps), np.exp(1j * eps)]))
    U = unitary_from_generator(HermitianObservable(random_hermitian(rng)), 0.3)
    assert np.max(np.abs(U.conj().T @ U - np.eye(2))) < 1e-10
    with pytest.raises(ValueError):
        unitary_from_generator(HermitianObservable(np.eye(17)), 0.1)


def test_unitary_matches_scipy_expm(rng):
    from scipy.linalg import expm

    A = random_hermitian(rng, 4)
    assert np.allclose(unitary_from_generator(HermitianObservable(A), 0.8), expm(-0.8j * A), atol=1e-12)


def test_perturbed_probability_examples(worked_states, rng):
    i, f = worked_states
    assert perturbed_probability(STOKES, i, f, 0.0) == pytest.approx(abs(inner(f, i)) ** 2, abs=1e-15)
    g = random_ket(rng)
    for eps in (0.1, 1.3, 7.0):
        assert perturbed_probability(STOKES, H, g, eps) == pytest.approx(abs(inner(g, H)) ** 2, abs=1e-14)
    eps = 0.01
    P = abs(inner(f, i)) ** 2
    ratio = perturbed_probability(STOKES, i, f, eps) / P
    # The remainder is O(eps^3) with a coefficient set by |S_w|^3 ~ 700.
    assert abs(ratio - ratio_series(STOKES, i, f, eps, 2)) < 1e3 * eps**3


def test_ratio_series_examples(worked_states):
    i, f = worked_states
    assert ratio_series(STOKES, i, f, 0.0, 2) == 1.0
    for eps in (0.01, 0.5, 3.0):
        assert ratio_series(STOKES, D, H, eps, 1) == 1.0
    sw = weak_value(STOKES, i, f).value
    expected = 1 + 0.02 * sw.imag - 1e-4 * (1 - abs(sw) ** 2)
    assert ratio_series(STOKES, i, f, 0.01, 2) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ValueError):
        ratio_series(STOKES, i, f, 0.01, 3)


def test_series_truncation_orders(rng):
    eps_grid = np.geomspace(1e-4, 1e-2, 9)
    done = 0
    while done < 20:
        A = HermitianObservable(random_hermitian(rng))
        i, f = random_ket(rng), random_ket(rng)
        P = abs(inner(f, i)) ** 2
        if P <= 0.01:
            continue
        exact = np.array([perturbed_probability(A, i, f, e) / P for e in eps_grid])
        for order in (1, 2):
            series = np.array([ratio_series(A, i, f, e, order) for e in eps_grid])
            assert loglog_slope(eps_grid, np.abs(exact - series)) >= order + 0.9
        done += 1


def test_weak_value_reduces_to_expectation(rng):
    for _ in range(50):
        A = HermitianObservable(random_hermitian(rng, 3))
        psi = random_ket(rng, 3)
        assert weak_value(A, psi, psi).value == pytest.approx(expectation(A, psi), abs=1e-12)


def test_involution_second_order_is_one(rng):
    # Reflections 2|u><u| - 1 square to the identity.
    for _ in range(50):
        u = random_ket(rng).amplitudes
        R = HermitianObservable(2 * np.outer(u, u.conj()) - np.eye(2))
        i, f = random_ket(rng), random_ket(rng)
        assert weak_value(R, i, f, 2).value == pytest.approx(1.0, abs=1e-12)


def test_global_phase_invariance(rng):
    A = HermitianObservable(random_hermitian(rng))
    i, f = random_ket(rng), random_ket(rng)
    base = perturbed_probability(A, i, f, 0.4)
    rotated_i = Ket(np.exp(0.7j) * i.amplitudes)
    rotated_f = Ket(np.exp(-2.1j) * f.amplitudes)
    assert perturbed_probability(A, rotated_i, rotated_f, 0.4) == pytest.approx(base, abs=1e-15)
