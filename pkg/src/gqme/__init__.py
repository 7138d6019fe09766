"""Quantum microcanonical averages and maximum-entropy ensembles.

Modules
-------
hilbert
    Spectrum, normalization, expectations and dephasing in the energy basis.
phase_average
    Time averages, phase-torus averages (Monte Carlo and exact grid) and
    closed forms for linear and covariance state functions.
canonical
    Canonical weights, inverse-temperature solver and thermodynamics.
oscillator
    Coherent states, classical energy, phase portraits and the
    two-constraint ensemble with its asymptotic profile.
estimators
    scikit-learn style wrappers.
cli
    The ``gqme`` command.
"""
from .canonical import CanonicalSolution, entropy, solve_beta, thermo_consistency, weights_at
from .estimators import CanonicalEnsemble, PhaseAverager, TwoConstraintEnsemble
from .exceptions import (
    BudgetExceeded, Degenerate, DimensionMismatch, GQMEError, InsufficientTail, NoConvergence,
    NonFinite, NonHermitian, NonPositiveAmplitude, OutOfRange, Overflow, TruncationTooSmall,
    UnknownDegree, ZeroVector,
)
from .hilbert import Spectrum, dephase, diag_trace, expectation, normalize
from .oscillator import (
    AsymptoticProfile, BranchWarning, EnsembleSolution, OscillatorConfig, asymptotic_profile,
    classical_energy, classical_energy_qp, coherent_state, forward_recurrence, ladder_observables,
    oscillator_spectrum, phase_portrait, solve_targets, solve_two_constraint, vareq_residual, zeta,
)
from .phase_average import (
    AverageReport, StateFunction, covariance_analytic, evolve, fourier_envelope, linear_analytic,
    time_average, torus_average_grid, torus_average_mc,
)

__version__ = "0.1.0"
