import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqme import Degenerate, OutOfRange, Spectrum, entropy, solve_beta, thermo_consistency, weights_at

TWO = Spectrum([0.0, 1.0])
FIVE = Spectrum([0.0, 0.3, 1.1, 1.7, 2.9])


def test_entropy_examples():
    assert entropy([0, 1, 0]) == 0.0
    assert abs(entropy([0.5, 0.5]) - math.log(2)) < 1e-15
    oracle = -(0.7 * math.log(0.7) + 0.2 * math.log(0.2) + 0.1 * math.log(0.1))
    assert abs(entropy([0.7, 0.2, 0.1]) - oracle) < 1e-15
    assert abs(entropy([0.5, 0.5], k_B=2.0) - 2 * math.log(2)) < 1e-15


def test_weights_at_infinite_temperature():
    s = weights_at(Spectrum([0.0, 1.0, 5.0, 7.0]), 0.0)
    np.testing.assert_allclose(s.weights, 0.25)
    assert abs(s.entropy - math.log(4)) < 1e-15


def test_weights_at_two_level():
    s = weights_at(TWO, 1.0)
    assert abs(s.weights[1] - 0.2689414213699951) < 1e-15
    np.testing.assert_allclose(s.weights, np.exp(-s.alpha - s.beta * TWO.levels), rtol=0, atol=1e-15)


def test_heat_capacity_finite_difference():
    # C = dE/dT with T = 1/(k_B beta); centered difference in T
    k_B, beta, h = 1.0, 1.3, 1e-5
    T = 1 / (k_B * beta)
    dE = weights_at(TWO, 1 / (k_B * (T + h))).energy - weights_at(TWO, 1 / (k_B * (T - h))).energy
    closed = beta ** 2 * math.exp(beta) / (1 + math.exp(beta)) ** 2
    assert abs(weights_at(TWO, beta).heat_capacity - closed) < 1e-14
    assert abs(dE / (2 * h) - closed) < 1e-8


def test_weights_at_extreme_beta_is_stable():
    s = weights_at(Spectrum([0.0, 1.0, 2.0]), 800.0)
    assert s.weights[0] == 1.0 and np.isfinite(s.alpha)
    s = weights_at(Spectrum([0.0, 1.0, 2.0]), -800.0)
    assert s.weights[-1] == 1.0


def test_solve_beta_examples():
    assert solve_beta(TWO, 0.5).beta == 0.0
    e1 = math.exp(-1) / (1 + math.exp(-1))
    assert abs(solve_beta(TWO, e1).beta - 1) < 1e-10
    assert abs(solve_beta(Spectrum([0.0, 1.0, 2.0]), 1.0).beta) < 1e-12


def test_solve_beta_negative_temperature():
    s = solve_beta(FIVE, 2.5)
    assert s.beta < 0 and abs(s.energy - 2.5) <= 1e-12


def test_solve_beta_errors():
    with pytest.raises(OutOfRange):
        solve_beta(TWO, 1.0)
    with pytest.raises(OutOfRange):
        solve_beta(TWO, -0.2)
    with pytest.raises(Degenerate):
        solve_beta(Spectrum([2.0, 2.0]), 2.0)


def test_thermo_consistency_examples():
    assert abs(thermo_consistency(TWO, 0.5, 1e-4)) < 1e-6
    assert abs(thermo_consistency(TWO, 0.3, 1e-4) - solve_beta(TWO, 0.3).beta) < 1e-6
    mean = float(np.mean(FIVE.levels))
    assert abs(thermo_consistency(FIVE, mean, 1e-4)) < 1e-8


def test_thermo_consistency_is_second_order():
    b = solve_beta(FIVE, 1.0).beta
    e1 = abs(thermo_consistency(FIVE, 1.0, 1e-2) - b)
    e2 = abs(thermo_consistency(FIVE, 1.0, 5e-3) - b)
    assert 3.0 < e1 / e2 < 5.0


def test_ground_state_limit():
    spec = Spectrum([0.0, 0.0, 1.0, 2.5])
    S, C = [], []
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-7):
        s = solve_beta(spec, eps)
        S.append(s.entropy)
        C.append(s.heat_capacity)
    assert all(np.diff(C) < 0) and C[-1] < 1e-3
    assert all(np.diff(np.abs(np.array(S) - math.log(2))) < 0)
    assert abs(S[-1] - math.log(2)) < 1e-3


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=7, unique=True), st.floats(0.05, 0.95),
       st.integers(0, 10 ** 6))
def test_maxent_properties(levels, frac, seed):
    lv = np.sort(np.array(levels))
    if lv[-1] - lv[0] < 1e-3:
        return
    spec = Spectrum(lv)
    E = lv[0] + frac * (lv[-1] - lv[0])
    sol = solve_beta(spec, E)
    assert abs(sol.energy - E) <= 1e-12 * max(1.0, abs(E))
    assert sol.heat_capacity >= 0
    np.testing.assert_allclose(weights_at(spec, sol.beta).weights, sol.weights, atol=1e-10, rtol=0)
    # constraint-preserving perturbations: directions orthogonal to (1, E_n)
    rng = np.random.default_rng(seed)
    basis = np.linalg.svd(np.vstack([np.ones_like(lv), lv]))[2][2:]
    for _ in range(20):
        if basis.shape[0] == 0:
            break
        v = rng.normal(size=basis.shape[0]) @ basis
        step = rng.uniform(0, 1) * np.min(np.where(v < 0, sol.weights / np.maximum(-v, 1e-300), np.inf))
        nu = np.clip(sol.weights + step * v, 0, None)
        nu /= nu.sum()
        if abs(nu @ lv - E) > 1e-9:
            continue
        assert entropy(nu) <= sol.entropy + 1e-9
    b = np.sort(rng.uniform(-3, 3, 2))
    assert weights_at(spec, b[0]).energy >= weights_at(spec, b[1]).energy
