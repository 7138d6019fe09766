"""Microcanonical averages of state functions.

A state function f(psi) is averaged either along the exact time
evolution, or over independent uniform phases attached to each active
amplitude (the phase torus).  For linear and covariance functions the
torus integral has closed forms, which the grid integrator reproduces
exactly.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
import json
import math

import numpy as np

from ._validation import (
    AMP_FLOOR, GRID_BUDGET, HERM_TOL, NORM_TOL,
    check_int, check_observable, check_state, real_part,
)
from .exceptions import BudgetExceeded, DimensionMismatch, NonFinite, UnknownDegree

_CHUNK = 8192


class StateFunction:
    """A real-valued function of a state with a declared phase degree.

    ``degree`` bounds the trigonometric degree in each phase variable
    and sizes the exact torus grid.  Use the ``linear``, ``covariance``
    and ``custom`` constructors rather than calling this directly.
    """

    def __init__(self, kind, payload, degree):
        if kind not in ("linear", "covariance", "custom"):
            raise ValueError("unknown state function kind {!r}".format(kind))
        if degree is not None:
            degree = check_int(degree, "degree", lo=0)
        self.kind = kind
        self.payload = payload
        self.degree = degree

    @classmethod
    def linear(cls, A, herm_tol=HERM_TOL):
        """f(psi) = <psi|A psi>."""
        return cls("linear", (check_observable(A, herm_tol=herm_tol),), 1)

    @classmethod
    def covariance(cls, A, B, herm_tol=HERM_TOL):
        """f(psi) = Re<psi|AB psi> - <psi|A psi><psi|B psi>.

        The real part is the symmetrized product, which keeps f real
        when A and B do not commute.
        """
        A = check_observable(A, herm_tol=herm_tol)
        B = check_observable(B, A.shape[0], herm_tol)
        return cls("covariance", (A, B), 2)

    @classmethod
    def custom(cls, func, degree=None):
        """Wrap ``func(psi) -> float``; degree None means grid is unavailable."""
        if not callable(func):
            raise TypeError("func must be callable")
        return cls("custom", (func,), degree)

    @property
    def dim(self):
        return None if self.kind == "custom" else self.payload[0].shape[0]

    def batch(self, states):
        """Evaluate on a (S, dim) array of states, returning S reals."""
        S = np.asarray(states, dtype=complex)
        if self.kind == "custom":
            out = np.array([float(self.payload[0](s)) for s in S])
        else:
            if S.shape[1] != self.dim:
                raise DimensionMismatch(
                    "state length {} does not match observable {}".format(S.shape[1], self.dim))
            AS = S @ self.payload[0].T
            a = np.einsum("si,si->s", S.conj(), AS).real
            if self.kind == "linear":
                out = a
            else:
                BS = S @ self.payload[1].T
                b = np.einsum("si,si->s", S.conj(), BS).real
                ab = np.einsum("si,si->s", AS.conj(), BS).real
                out = ab - a * b
        if not np.all(np.isfinite(out)):
            raise NonFinite("state function returned a non-finite value")
        return out

    def __call__(self, psi):
        return float(self.batch(np.asarray(psi, dtype=complex)[None, :])[0])

    def __repr__(self):
        return "StateFunction(kind={!r}, degree={!r})".format(self.kind, self.degree)


@dataclass(frozen=True)
class AverageReport:
    value: float
    method: str
    samples: int
    error_estimate: float

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict())


def _levels(spec):
    return np.asarray(spec.levels, dtype=float)


def evolve(psi, spec, t):
    """Amplitudes lambda_n exp(-i E_n t / hbar)."""
    psi = np.asarray(psi, dtype=complex)
    E = _levels(spec)
    if psi.shape != E.shape:
        raise DimensionMismatch("state length {} vs spectrum {}".format(psi.size, E.size))
    return psi * np.exp(-1j * E * (float(t) / spec.hbar))


def default_horizon(spec, degree=2, T=None, per_period=64):
    """Default (T, steps).

    T defaults to 1e3 over the smallest gap; steps resolve the fastest
    frequency a degree-``degree`` function can carry with per_period
    nodes per period.
    """
    gap = spec.min_gap()
    if gap is None:
        return (1.0 if T is None else T), 2
    if T is None:
        T = 1e3 / gap
    fastest = degree * (spec.levels[-1] - spec.levels[0]) / spec.hbar
    steps = max(2, int(math.ceil(per_period * T * fastest / (2 * math.pi))))
    return T, steps


def time_average(f, psi, spec, T=None, steps=None, norm_tol=NORM_TOL):
    """Trapezoid estimate of (1/T) int_0^T f(psi_t) dt.

    The error estimate is the Richardson difference against the pass
    that uses every other node (an odd step count closes the coarse
    pass with one fine interval).
    """
    psi = check_state(psi, spec.dim, norm_tol)
    if T is not None and not (np.isfinite(T) and T > 0):
        raise ValueError("T must be positive, got {!r}".format(T))
    T, dsteps = default_horizon(spec, f.degree or 1, T)
    T = float(T)
    steps = dsteps if steps is None else check_int(steps, "steps", lo=2)
    E = _levels(spec)
    h = T / steps
    vals = np.empty(steps + 1)
    for start in range(0, steps + 1, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, steps + 1))
        vals[idx] = f.batch(psi[None, :] * np.exp(-1j * np.outer(idx * h, E) / spec.hbar))
    value = h * (math.fsum(vals) - 0.5 * (vals[0] + vals[-1])) / T
    last = steps - steps % 2
    ev = vals[:last + 1:2]
    coarse = 2 * h * (math.fsum(ev) - 0.5 * (ev[0] + ev[-1]))
    if last < steps:
        coarse += 0.5 * h * (vals[-2] + vals[-1])
    err = abs(value - coarse / T) / 3.0
    return AverageReport(float(value), "time", int(steps), float(err))


def active_modes(psi, amp_floor=AMP_FLOOR):
    return np.flatnonzero(np.abs(np.asarray(psi)) > amp_floor)


def _phased(psi, active, chi):
    """Rows of psi with phases chi (S, k) applied on the active modes."""
    out = np.repeat(psi[None, :], chi.shape[0], axis=0)
    out[:, active] = psi[active] * np.exp(1j * chi)
    return out


def _mc_block(f, psi, active, seed, a, b):
    k = active.size
    bg = np.random.Philox(key=seed)
    bg.advance((a * k) // 4)
    g = np.random.Generator(bg)
    g.random((a * k) % 4)
    chi = 2 * np.pi * g.random((b - a) * k).reshape(b - a, k)
    vals = []
    for s in range(0, b - a, _CHUNK):
        vals.append(f.batch(_phased(psi, active, chi[s:s + _CHUNK])))
    return np.concatenate(vals)


def torus_average_mc(f, psi, samples, seed=0, block=65536, n_jobs=1,
                     amp_floor=AMP_FLOOR, norm_tol=NORM_TOL):
    """Monte Carlo torus average with i.i.d. uniform phases.

    Phases come from a counter-based Philox stream keyed by ``seed``;
    sample j always uses the same counters, so the result does not
    depend on ``block`` or ``n_jobs``.
    """
    psi = check_state(psi, norm_tol=norm_tol)
    samples = check_int(samples, "samples", lo=1)
    seed = check_int(seed, "seed", lo=0)
    active = active_modes(psi, amp_floor)
    if active.size <= 1:
        return AverageReport(f(psi), "torus-mc", samples, 0.0)
    bounds = [(a, min(a + block, samples)) for a in range(0, samples, block)]
    if n_jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            parts = list(ex.map(lambda ab: _mc_block(f, psi, active, seed, *ab), bounds))
    else:
        parts = [_mc_block(f, psi, active, seed, a, b) for a, b in bounds]
    vals = np.concatenate(parts)
    mean = math.fsum(vals) / samples
    if samples > 1:
        var = math.fsum((vals - mean) ** 2) / (samples - 1)
        stderr = math.sqrt(var / samples)
    else:
        stderr = 0.0
    return AverageReport(float(mean), "torus-mc", samples, float(stderr))


def _torus_grid_values(f, psi, active, budget):
    if f.degree is None:
        raise UnknownDegree("state function has no declared degree; use torus_average_mc")
    pts = 2 * f.degree + 1
    k = active.size
    if pts ** k > budget:
        raise BudgetExceeded("grid of {}^{} points exceeds budget {}".format(pts, k, budget))
    total = pts ** k
    vals = np.empty(total)
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        chi = 2 * np.pi * np.stack(np.unravel_index(flat, (pts,) * k), axis=1) / pts
        vals[start:start + flat.size] = f.batch(_phased(psi, active, chi))
    return vals.reshape((pts,) * k)


def torus_average_grid(f, psi, budget=GRID_BUDGET, amp_floor=AMP_FLOOR, norm_tol=NORM_TOL):
    """Exact torus integral for functions of declared finite degree.

    Uses 2d+1 equispaced nodes per active phase; the rectangle rule is
    exact for trigonometric polynomials of that degree.
    """
    psi = check_state(psi, norm_tol=norm_tol)
    active = active_modes(psi, amp_floor)
    if active.size <= 1:
        if f.degree is None:
            raise UnknownDegree("state function has no declared degree; use torus_average_mc")
        return AverageReport(f(psi), "torus-grid", 1, 0.0)
    vals = _torus_grid_values(f, psi, active, budget)
    return AverageReport(float(math.fsum(vals.ravel()) / vals.size), "torus-grid", int(vals.size), 0.0)


def fourier_envelope(f, psi, spec, budget=GRID_BUDGET, amp_floor=AMP_FLOOR, norm_tol=NORM_TOL):
    """Constants (C, resonant) bounding the finite-time average.

    f(psi_t) is a finite sum of c_k exp(-i w_k t) with w_k = k.E/hbar.
    For every T, |time_average(T) - grid - resonant| <= C / T, where
    C = sum over non-resonant k of 2|c_k|/|w_k| and ``resonant`` is the
    sum of the nonzero k with w_k = 0 (zero on gap-nondegenerate
    spectra).  The trapezoid rule obeys the same bound while the step
    resolves every w_k below the Nyquist limit.
    """
    psi = check_state(psi, spec.dim, norm_tol)
    active = active_modes(psi, amp_floor)
    if active.size <= 1:
        return 0.0, 0.0
    vals = _torus_grid_values(f, psi, active, budget)
    c = np.fft.fftn(vals) / vals.size
    pts = vals.shape[0]
    freqs = np.fft.fftfreq(pts, 1.0 / pts)
    grids = np.meshgrid(*([freqs] * active.size), indexing="ij")
    E = _levels(spec)[active]
    # psi_t carries exp(-i E t); the phase coefficient k pairs with exp(i k chi)
    w = sum(g * e for g, e in zip(grids, E)) / spec.hbar
    zero = np.all([g == 0 for g in grids], axis=0)
    res_mask = (np.abs(w) < spec.gap_tol / spec.hbar) & ~zero
    C = float(np.sum(2 * np.abs(c[~res_mask & ~zero]) / np.abs(w[~res_mask & ~zero])))
    resonant = float(np.sum(c[res_mask]).real)
    return C, resonant


def linear_analytic(psi, A, herm_tol=HERM_TOL, norm_tol=NORM_TOL):
    """sum_n |lambda_n|^2 A_nn."""
    psi = check_state(psi, norm_tol=norm_tol)
    A = check_observable(A, psi.size, herm_tol)
    return float(np.dot(np.abs(psi) ** 2, np.diag(A).real))


def covariance_analytic(psi, A, B, herm_tol=HERM_TOL, norm_tol=NORM_TOL):
    """Closed-form torus average of the covariance state function.

    Tr rho AB - Tr rho A Tr rho B - Tr rho A rho B + sum_n mu_n^2 A_nn B_nn
    with rho = diag(mu), mu_n = |lambda_n|^2.  Only the real part of
    Tr rho AB enters since the state function uses the symmetrized
    product; the other terms are real and their imaginary residue is
    checked against herm_tol.
    """
    psi = check_state(psi, norm_tol=norm_tol)
    A = check_observable(A, psi.size, herm_tol)
    B = check_observable(B, psi.size, herm_tol)
    mu = np.abs(psi) ** 2
    R = np.diag(mu)
    t1 = np.trace(R @ A @ B).real
    t2 = real_part(np.trace(R @ A), herm_tol, "Tr rho A") * real_part(np.trace(R @ B), herm_tol, "Tr rho B")
    t3 = real_part(np.trace(R @ A @ R @ B), herm_tol, "Tr rho A rho B")
    t4 = real_part(np.sum(mu ** 2 * np.diag(A) * np.diag(B)), herm_tol, "diagonal term")
    return float(t1 - t2 - t3 + t4)
