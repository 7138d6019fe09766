"""Input checks shared across modules."""
import numbers

import numpy as np

from .exceptions import DimensionMismatch, NonFinite, NonHermitian

NORM_TOL = 1e-10
HERM_TOL = 1e-10
GAP_TOL = 1e-9
AMP_FLOOR = 1e-14
TAIL_TOL = 1e-12
SOLVER_TOL = 1e-9
ENERGY_TOL = 1e-12
UNDERFLOW_TOL = 1e-300
GRID_BUDGET = 10**6

DEFAULT_TOLS = {
    "norm_tol": NORM_TOL,
    "herm_tol": HERM_TOL,
    "gap_tol": GAP_TOL,
    "amp_floor": AMP_FLOOR,
    "tail_tol": TAIL_TOL,
    "solver_tol": SOLVER_TOL,
    "energy_tol": ENERGY_TOL,
    "underflow_tol": UNDERFLOW_TOL,
}


def check_vector(x, name="vector", dtype=complex):
    a = np.asarray(x, dtype=dtype)
    if a.ndim != 1 or a.size == 0:
        raise DimensionMismatch("{} must be a non-empty 1-d array, got shape {}".format(name, a.shape))
    if not np.all(np.isfinite(a)):
        raise NonFinite("{} contains non-finite entries".format(name))
    return a


def check_state(psi, dim=None, norm_tol=NORM_TOL):
    """Return psi as a complex array, checking length and unit norm."""
    a = check_vector(psi, "state")
    if dim is not None and a.size != dim:
        raise DimensionMismatch("state has length {}, expected {}".format(a.size, dim))
    nrm = float(np.sum(np.abs(a) ** 2))
    if abs(nrm - 1.0) > norm_tol:
        raise ValueError("state is not normalized: sum |amp|^2 = {!r}".format(nrm))
    return a


def check_observable(A, dim=None, herm_tol=HERM_TOL):
    a = np.asarray(A, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("observable must be square, got shape {}".format(a.shape))
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch("observable has dimension {}, expected {}".format(a.shape[0], dim))
    if not np.all(np.isfinite(a)):
        raise NonFinite("observable contains non-finite entries")
    if a.size and np.max(np.abs(a - a.conj().T)) > herm_tol:
        raise NonHermitian("observable is not Hermitian within {}".format(herm_tol))
    return a


def check_weights(mu, dim=None, norm_tol=NORM_TOL):
    w = check_vector(mu, "weights", dtype=float)
    if dim is not None and w.size != dim:
        raise DimensionMismatch("weights have length {}, expected {}".format(w.size, dim))
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if abs(float(np.sum(w)) - 1.0) > norm_tol:
        raise ValueError("weights must sum to 1, got {!r}".format(float(np.sum(w))))
    return w


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError("{} must be a finite positive real, got {!r}".format(name, value))
    return float(value)


def check_int(value, name, lo=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError("{} must be an integer, got {!r}".format(name, value))
    if lo is not None and value < lo:
        raise ValueError("{} must be >= {}, got {}".format(name, lo, value))
    return int(value)


def real_part(z, herm_tol=HERM_TOL, what="value"):
    """Drop an imaginary residue after checking it is below herm_tol."""
    z = complex(z)
    if abs(z.imag) > herm_tol * max(1.0, abs(z.real)):
        raise NonHermitian("{} has imaginary part {!r}".format(what, z.imag))
    return z.real
