"""scikit-learn style wrappers around the solvers.

These follow the estimator conventions (constructor stores parameters
untouched, ``fit`` returns self, fitted state ends in an underscore) so
they compose with ``get_params``/``set_params``, ``clone`` and
parameter sweeps.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import canonical, phase_average
from .hilbert import Spectrum, normalize
from .oscillator import OscillatorConfig, asymptotic_profile, solve_two_constraint


def _energies(E):
    return check_array(np.atleast_1d(np.asarray(E, dtype=float)), ensure_2d=False).ravel()


class CanonicalEnsemble(BaseEstimator):
    """Canonical maximum-entropy ensemble on a finite spectrum.

    ``fit`` takes the energy levels; ``predict`` maps mean energies to
    inverse temperatures and ``transform`` maps them to weights.
    """

    def __init__(self, k_B=1.0, tol=1e-12, hbar=1.0):
        self.k_B = k_B
        self.tol = tol
        self.hbar = hbar

    def _check_parameters(self):
        for name in ("k_B", "tol", "hbar"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not v > 0:
                raise ValueError("{} must be a positive number; got {!r}.".format(name, v))

    def fit(self, levels, y=None):
        self._check_parameters()
        lv = np.sort(_energies(levels))
        self.spectrum_ = Spectrum(lv, hbar=self.hbar)
        self.n_levels_ = lv.size
        return self

    def solve(self, energies):
        """CanonicalSolution for each mean energy."""
        check_is_fitted(self, "spectrum_")
        return [canonical.solve_beta(self.spectrum_, e, self.tol, self.k_B) for e in _energies(energies)]

    def predict(self, energies):
        return np.array([s.beta for s in self.solve(energies)])

    def transform(self, energies):
        return np.array([s.weights for s in self.solve(energies)])

    def weights_at(self, beta):
        check_is_fitted(self, "spectrum_")
        return canonical.weights_at(self.spectrum_, beta, self.k_B)


class PhaseAverager(TransformerMixin, BaseEstimator):
    """Microcanonical average of observables for a fixed state.

    ``fit(psi, levels)`` stores the normalized state (levels are needed
    only for ``method="time"``); ``transform`` takes a stack of
    observables, shape (k, d, d), and returns their k averages.
    """

    _methods = ("analytic", "grid", "mc", "time")

    def __init__(self, method="analytic", samples=100000, seed=0, T=None, steps=None, n_jobs=1):
        self.method = method
        self.samples = samples
        self.seed = seed
        self.T = T
        self.steps = steps
        self.n_jobs = n_jobs

    def _check_parameters(self):
        if self.method not in self._methods:
            raise ValueError("Invalid value for method. Allowed string values are {}.".format(
                ", ".join(self._methods)))
        if not isinstance(self.samples, (int, np.integer)) or self.samples < 1:
            raise ValueError("samples must be a positive integer; got {!r}.".format(self.samples))

    def fit(self, psi, levels=None):
        self._check_parameters()
        self.state_ = normalize(psi)
        self.spectrum_ = None if levels is None else Spectrum(np.asarray(levels, dtype=float))
        if self.method == "time" and self.spectrum_ is None:
            raise ValueError("method='time' needs the energy levels.")
        self.n_features_in_ = self.state_.size
        return self

    def _one(self, A):
        f = phase_average.StateFunction.linear(A)
        if self.method == "analytic":
            return phase_average.linear_analytic(self.state_, A)
        if self.method == "grid":
            return phase_average.torus_average_grid(f, self.state_).value
        if self.method == "mc":
            return phase_average.torus_average_mc(
                f, self.state_, self.samples, self.seed, n_jobs=self.n_jobs).value
        return phase_average.time_average(f, self.state_, self.spectrum_, self.T, self.steps).value

    def transform(self, observables):
        check_is_fitted(self, "state_")
        obs = np.asarray(observables, dtype=complex)
        if obs.ndim == 2:
            obs = obs[None]
        return np.array([self._one(A) for A in obs])


class TwoConstraintEnsemble(BaseEstimator):
    """Oscillator ensemble at fixed energy and classical energy.

    ``fit`` solves for the amplitudes at the given multipliers and
    stores the solution, its weights and the asymptotic profile.
    """

    def __init__(self, beta=1.0, gamma=0.5, lambda0=None, N=60, m=1.0, omega=1.0, hbar=1.0,
                 tail_tol=1e-12, solver_tol=1e-9):
        self.beta = beta
        self.gamma = gamma
        self.lambda0 = lambda0
        self.N = N
        self.m = m
        self.omega = omega
        self.hbar = hbar
        self.tail_tol = tail_tol
        self.solver_tol = solver_tol

    def fit(self, X=None, y=None):
        cfg = OscillatorConfig(self.m, self.omega, self.hbar, self.N, self.tail_tol)
        self.solution_ = solve_two_constraint(self.beta, self.gamma, self.lambda0, cfg, self.solver_tol)
        self.weights_ = self.solution_.weights
        self.coef_ = self.solution_.state
        self.profile_ = asymptotic_profile(self.solution_, 0.0) if self.gamma > 0 else None
        return self
