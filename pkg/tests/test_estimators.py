import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gqme import linear_analytic, solve_beta, Spectrum
from gqme.estimators import CanonicalEnsemble, PhaseAverager, TwoConstraintEnsemble

from conftest import random_hermitian, random_state


def test_canonical_ensemble_api():
    est = CanonicalEnsemble(k_B=2.0)
    assert est.get_params() == {"k_B": 2.0, "tol": 1e-12, "hbar": 1.0}
    est.fit([1.0, 0.0])
    np.testing.assert_array_equal(est.spectrum_.levels, [0.0, 1.0])
    beta = est.predict([0.3, 0.5, 0.7])
    assert beta[1] == 0 and abs(beta[0] + beta[2]) < 1e-12
    assert abs(beta[0] - solve_beta(Spectrum([0.0, 1.0]), 0.3).beta) < 1e-15
    w = est.transform([0.3])
    assert w.shape == (1, 2) and abs(w.sum() - 1) < 1e-15
    assert clone(est).get_params() == est.get_params()


def test_canonical_ensemble_validation():
    with pytest.raises(NotFittedError):
        CanonicalEnsemble().predict([0.5])
    with pytest.raises(ValueError):
        CanonicalEnsemble(tol=-1).fit([0, 1])


def test_phase_averager_methods(rng):
    psi = random_state(rng, 3)
    obs = np.array([random_hermitian(rng, 3) for _ in range(2)])
    ref = [linear_analytic(psi, A) for A in obs]
    np.testing.assert_allclose(PhaseAverager().fit(psi).transform(obs), ref, atol=1e-15)
    np.testing.assert_allclose(PhaseAverager(method="grid").fit(psi).transform(obs), ref, atol=1e-13)
    mc = PhaseAverager(method="mc", samples=20000, seed=4).fit(psi).transform(obs)
    np.testing.assert_allclose(mc, ref, atol=0.05)
    levels = [0.0, 1.0, 1 + np.sqrt(5) / 2]
    tav = PhaseAverager(method="time", T=1e4).fit(psi, levels).transform(obs)
    np.testing.assert_allclose(tav, ref, atol=1e-3)


def test_phase_averager_validation(rng):
    with pytest.raises(ValueError):
        PhaseAverager(method="bogus").fit(random_state(rng, 2))
    with pytest.raises(ValueError):
        PhaseAverager(method="time").fit(random_state(rng, 2))
    with pytest.raises(NotFittedError):
        PhaseAverager().transform(np.eye(2))


def test_two_constraint_estimator_gamma_zero():
    est = TwoConstraintEnsemble(beta=1.0, gamma=0.0, N=60).fit()
    assert est.profile_ is None
    assert abs(est.weights_.sum() - 1) < 1e-12
    assert est.get_params()["N"] == 60
