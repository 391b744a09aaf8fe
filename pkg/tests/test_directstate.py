import math

import numpy as np
import pytest

from weakwave.directstate import (
    Method,
    c_factor,
    direct_state,
    fidelity,
    fix_global_phase,
    infidelity,
    measure_weak_value,
    reconstruct_exact,
    reconstruct_via_crystal,
)
from weakwave.errors import SmallOverlap
from weakwave.qcore import ANTI, D, H, V, Ket, inner, preselection_state

from conftest import random_ket
from oracles import loglog_slope, worked_pre, stokes_weak_value_2x2

DIAG = (1 / math.sqrt(2), 1 / math.sqrt(2))


def _random_state_away_from_anti(rng):
    while True:
        k = random_ket(rng)
        if abs(inner(D, k)) ** 2 > 0.01:
            return k


def test_direct_state_eigen_examples():
    assert direct_state(1.0) == H
    assert direct_state(-1.0) == V
    assert infidelity(direct_state(0.0), D) < 1e-30


def test_direct_state_worked_example_round_trip():
    sw = stokes_weak_value_2x2(worked_pre(), DIAG)
    rebuilt = direct_state(sw)
    truth = Ket(worked_pre())
    assert infidelity(rebuilt, truth) < 1e-12
    assert np.allclose(rebuilt.amplitudes, fix_global_phase(rebuilt.amplitudes), atol=1e-16)
    assert rebuilt.amplitudes[0].imag == 0 and rebuilt.amplitudes[0].real > 0


def test_components_sum_to_one(rng):
    for sw in rng.normal(size=50) * 10 + 1j * rng.normal(size=50) * 10:
        assert abs((1 + sw) / 2 + (1 - sw) / 2 - 1) <= 4e-16 * abs(sw)
        direct_state(sw)
    for sw in (0.5, -3.0, 2j, 0.25 - 0.75j):
        assert (1 + sw) / 2 + (1 - sw) / 2 == 1


def test_direct_state_rejects_nonfinite():
    with pytest.raises(ValueError):
        direct_state(complex("nan"))
    with pytest.raises(ValueError):
        direct_state(complex("inf"))


def test_global_phase_convention():
    out = fix_global_phase([0.6j, -0.8])
    assert out[1] == 0.8 and out[1].imag == 0
    tie = fix_global_phase([1j, 1j])
    assert tie[0] == 1 and tie[1] == pytest.approx(1)


def test_exact_round_trip_many_states(rng):
    for _ in range(100):
        truth = _random_state_away_from_anti(rng)
        report = reconstruct_exact(truth)
        assert report.method is Method.EXACT
        assert report.fidelity >= 1 - 1e-12
        assert fidelity(report.reconstructed, truth) >= 1 - 1e-12


def test_c_factor_scales_components_into_weak_values(rng):
    truth = _random_state_away_from_anti(rng)
    report = reconstruct_exact(truth)
    scaled = report.c_factor * truth.amplitudes
    assert scaled[0] == pytest.approx((1 + report.s_w) / 2, abs=1e-12)
    assert scaled[1] == pytest.approx((1 - report.s_w) / 2, abs=1e-12)
    assert c_factor(H) == pytest.approx(1.0)


def test_small_overlap_rejected():
    with pytest.raises(SmallOverlap):
        reconstruct_exact(ANTI)
    nearly = Ket([1, -1 + 1e-4])
    with pytest.raises(SmallOverlap):
        reconstruct_via_crystal(nearly, 1e-3)
    with pytest.raises(ValueError):
        reconstruct_via_crystal(H, 0.0)


def test_crystal_reconstruction_examples():
    assert reconstruct_via_crystal(H, 1e-3).fidelity >= 1 - 1e-6
    truth = preselection_state(0.1)
    report = reconstruct_via_crystal(truth, 1e-3)
    assert report.method is Method.SIMULATED and report.epsilon == 1e-3
    assert report.fidelity >= 1 - 1e-4
    exact = stokes_weak_value_2x2(worked_pre(), DIAG)
    assert report.s_w == pytest.approx(exact, rel=1e-3)


def test_breakdown_trend():
    truth = preselection_state(0.1)
    losses = [infidelity(reconstruct_via_crystal(truth, e).reconstructed, truth) for e in (1e-3, 0.1, 0.5)]
    assert losses[0] < losses[1] < losses[2]
    assert reconstruct_via_crystal(truth, 0.5).fidelity < reconstruct_via_crystal(truth, 1e-3).fidelity


def test_infidelity_scaling():
    truth = preselection_state(0.1)
    eps = np.geomspace(1e-3, 1e-1, 5)
    losses = [infidelity(reconstruct_via_crystal(truth, e).reconstructed, truth) for e in eps]
    # The centroid bias is even in eps, so the loss actually falls off faster than linearly.
    assert loglog_slope(eps, losses) >= 0.9


def test_measured_weak_value_real_for_eigenstate():
    sw = measure_weak_value(H, 1e-3)
    assert sw.real == pytest.approx(1.0, abs=1e-9)
    assert abs(sw.imag) < 1e-9
