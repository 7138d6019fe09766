import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqme import (
    DimensionMismatch, NonHermitian, Spectrum, ZeroVector, dephase, diag_trace, expectation, normalize,
)
from gqme.hilbert import state_from_json, state_to_json

from conftest import random_hermitian, random_state


def test_normalize_scaling():
    np.testing.assert_allclose(normalize([2, 0]), [1, 0])


def test_normalize_symmetric():
    np.testing.assert_allclose(normalize([1, 1]), [2 ** -0.5, 2 ** -0.5])


def test_normalize_underflow_guard():
    with pytest.raises(ZeroVector):
        normalize([1e-320, 0])


def test_normalize_tiny_but_valid():
    out = normalize([1e-200, 1e-200])
    assert abs(np.sum(np.abs(out) ** 2) - 1) < 1e-15


def test_expectation_eigenstate():
    e = np.zeros(3)
    e[1] = 1
    assert expectation(e, np.diag([0.5, 2.5, -1.0])) == 2.5


def test_expectation_pauli_x():
    psi = np.array([1, 1]) / np.sqrt(2)
    assert abs(expectation(psi, [[0, 1], [1, 0]]) - 1) < 1e-15


def test_expectation_matches_double_sum(rng):
    psi = random_state(rng, 4)
    A = random_hermitian(rng, 4)
    oracle = sum(np.conj(psi[m]) * A[m, n] * psi[n] for m in range(4) for n in range(4))
    assert abs(expectation(psi, A) - oracle.real) < 1e-12


def test_expectation_errors(rng):
    with pytest.raises(DimensionMismatch):
        expectation(random_state(rng, 3), np.eye(4))
    with pytest.raises(NonHermitian):
        expectation(random_state(rng, 2), [[0, 1], [0, 0]])


def test_dephase_examples():
    np.testing.assert_allclose(dephase(np.array([1, 1]) / np.sqrt(2)), [0.5, 0.5])
    np.testing.assert_array_equal(dephase([0, 0, 1]), [0, 0, 1])


def test_dephase_coherent_poisson():
    # amplitudes e^{-1/2} / sqrt(n!) at |z|^2 = 1; Poisson weights e^{-1}/n!
    from math import exp, factorial, sqrt
    amps = np.array([exp(-0.5) / sqrt(factorial(n)) for n in range(40)])
    amps /= np.linalg.norm(amps)
    poisson = np.array([exp(-1) / factorial(n) for n in range(40)])
    np.testing.assert_allclose(dephase(amps), poisson, atol=1e-10, rtol=0)


def test_dephase_rejects_unnormalized():
    with pytest.raises(ValueError):
        dephase([1, 1])


def test_diag_trace_examples():
    assert diag_trace([0.5, 0.5], np.diag([0, 1])) == 0.5
    assert diag_trace([0, 1, 0], np.diag([3, 7, 9])) == 7


def test_diag_trace_full_trace_oracle(rng):
    mu = rng.random(5)
    mu /= mu.sum()
    A = random_hermitian(rng, 5)
    assert abs(diag_trace(mu, A) - np.trace(np.diag(mu) @ A).real) < 1e-14


def test_diag_trace_dimension():
    with pytest.raises(DimensionMismatch):
        diag_trace([0.5, 0.5], np.eye(3))


def test_spectrum_flags():
    s = Spectrum([0.0, 1.0, 2.0])
    assert not s.degenerate and s.gap_degenerate
    s = Spectrum([0.0, 1.0, 1.0 + np.sqrt(5) * 0.5])
    assert not s.degenerate and not s.gap_degenerate
    s = Spectrum([0.0, 1.0, 1.0 + 1e-12])
    assert s.degenerate and s.gap_degenerate
    assert not Spectrum([0.0, 1.0]).gap_degenerate


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum([1.0, 0.0])
    with pytest.raises(ValueError):
        Spectrum([0.0, 1.0], hbar=0)


def test_spectrum_is_immutable():
    s = Spectrum([0.0, 1.0])
    with pytest.raises(ValueError):
        s.levels[0] = 3.0


def test_json_round_trip(rng):
    psi = random_state(rng, 5)
    back = state_from_json(state_to_json(psi))
    np.testing.assert_array_equal(back, psi)
    assert json.loads(state_to_json([1j, 0]))[0] == [0.0, 1.0]
    s = Spectrum([0.5, 1.5, 2.5], hbar=2.0)
    t = Spectrum.from_json(s.to_json())
    np.testing.assert_array_equal(t.levels, s.levels)
    assert t.hbar == 2.0


complex_vectors = st.integers(2, 7).flatmap(
    lambda d: st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=d, max_size=d)
).map(lambda xs: np.array([a + 1j * b for a, b in xs])).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=60, deadline=None)
@given(complex_vectors, st.data())
def test_properties(raw, data):
    psi = normalize(raw)
    d = psi.size
    mu = dephase(psi)
    assert abs(mu.sum() - 1) < 1e-14
    chi = np.array(data.draw(st.lists(st.floats(0, 2 * np.pi), min_size=d, max_size=d)))
    np.testing.assert_allclose(dephase(psi * np.exp(1j * chi)), mu, atol=1e-15)
    assert abs(expectation(psi, np.eye(d)) - 1) < 1e-12
    D = np.diag(np.array(data.draw(st.lists(st.floats(-10, 10), min_size=d, max_size=d))))
    assert abs(diag_trace(mu, D) - expectation(psi, D)) < 1e-12
