"""State and observable algebra in the energy eigenbasis.

States are complex 1-d arrays of amplitudes, observables are dense
Hermitian matrices and dephased densities are the diagonal weights
``|amp_n|**2``.  Only the spectrum carries extra metadata, so it gets
its own frozen dataclass.
"""
from dataclasses import dataclass, field
import json

import numpy as np

from ._validation import (
    GAP_TOL, HERM_TOL, NORM_TOL, UNDERFLOW_TOL,
    check_observable, check_state, check_vector, check_weights, real_part,
)
from .exceptions import DimensionMismatch, NonFinite, ZeroVector


def _has_close_pair(values, tol):
    v = np.sort(np.asarray(values, dtype=float))
    return bool(v.size > 1 and np.any(np.diff(v) < tol))


@dataclass(frozen=True)
class Spectrum:
    """Ascending energy levels with degeneracy diagnostics.

    ``degenerate`` is set when two levels lie within ``gap_tol``.
    ``gap_degenerate`` is set when two distinct ordered pairs share the
    same level difference within ``gap_tol``, which includes the case of
    a degenerate level.
    """

    levels: np.ndarray
    hbar: float = 1.0
    gap_tol: float = GAP_TOL
    degenerate: bool = field(init=False)
    gap_degenerate: bool = field(init=False)

    def __post_init__(self):
        lv = np.array(self.levels, dtype=float)
        if lv.ndim != 1 or lv.size == 0:
            raise DimensionMismatch("levels must be a non-empty 1-d array")
        if not np.all(np.isfinite(lv)):
            raise NonFinite("levels must be finite")
        if np.any(np.diff(lv) < 0):
            raise ValueError("levels must be sorted ascending")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError("hbar must be positive, got {!r}".format(self.hbar))
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)
        deg = _has_close_pair(lv, self.gap_tol)
        i, j = np.triu_indices(lv.size, k=1)
        gdeg = deg or _has_close_pair(lv[j] - lv[i], self.gap_tol)
        object.__setattr__(self, "degenerate", deg)
        object.__setattr__(self, "gap_degenerate", gdeg)

    @property
    def dim(self):
        return self.levels.size

    def min_gap(self):
        """Smallest nonzero level spacing, or None for a single level."""
        d = np.diff(self.levels)
        d = d[d > self.gap_tol]
        return float(d.min()) if d.size else None

    def to_json(self):
        return json.dumps({"levels": [float(e) for e in self.levels], "hbar": float(self.hbar)})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(np.array(obj["levels"], dtype=float), hbar=float(obj.get("hbar", 1.0)))


def normalize(raw, underflow_tol=UNDERFLOW_TOL):
    """Scale a nonzero complex vector to unit norm."""
    a = check_vector(raw, "raw")
    scale = np.max(np.abs(a))
    if scale < underflow_tol:
        raise ZeroVector("vector norm below {}".format(underflow_tol))
    # rescale first so tiny but representable entries do not underflow when squared
    b = a / scale
    return b / np.sqrt(np.sum(np.abs(b) ** 2))


def expectation(psi, A, herm_tol=HERM_TOL):
    """<psi|A psi> as a real number."""
    psi = check_vector(psi, "state")
    A = check_observable(A, psi.size, herm_tol)
    return real_part(np.vdot(psi, A @ psi), herm_tol, "expectation")


def dephase(psi, norm_tol=NORM_TOL):
    """Diagonal weights |amp_n|**2 of the time-averaged density."""
    psi = check_state(psi, norm_tol=norm_tol)
    return np.abs(psi) ** 2


def diag_trace(rho, A, herm_tol=HERM_TOL):
    """sum_n mu_n A_nn."""
    mu = check_weights(rho)
    A = check_observable(A, mu.size, herm_tol)
    return float(np.dot(mu, np.diag(A).real))


def state_to_json(psi):
    """Serialize amplitudes as a list of [re, im] pairs."""
    psi = check_vector(psi, "state")
    return json.dumps([[float(z.real), float(z.imag)] for z in psi])


def state_from_json(text):
    pairs = np.asarray(json.loads(text), dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DimensionMismatch("expected a list of [re, im] pairs")
    return pairs[:, 0] + 1j * pairs[:, 1]
