"""Single-constraint maximum entropy: canonical weights and thermodynamics."""
from dataclasses import dataclass
import json
import math

import numpy as np
from scipy.special import entr, logsumexp

from ._validation import ENERGY_TOL, check_weights
from .exceptions import Degenerate, NoConvergence, OutOfRange, Overflow


@dataclass(frozen=True)
class CanonicalSolution:
    beta: float
    alpha: float
    weights: np.ndarray
    energy: float
    entropy: float
    heat_capacity: float

    def to_dict(self):
        return {
            "beta": self.beta,
            "alpha": self.alpha,
            "weights": [float(w) for w in self.weights],
            "energy": self.energy,
            "entropy": self.entropy,
            "heat_capacity": self.heat_capacity,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def entropy(mu, k_B=1.0):
    """-k_B sum mu_n ln mu_n, with 0 ln 0 = 0."""
    mu = check_weights(mu)
    return float(k_B * math.fsum(entr(mu)))


def _moments(E, beta):
    x = -beta * E
    alpha = float(logsumexp(x))
    if not np.isfinite(alpha):
        raise Overflow("partition function overflowed at beta={!r}".format(beta))
    w = np.exp(x - alpha)
    mean = float(np.dot(w, E))
    var = float(np.dot(w, (E - mean) ** 2))
    return alpha, w, mean, var


def weights_at(spec, beta, k_B=1.0):
    """Canonical weights exp(-alpha - beta E_n) with alpha = ln Z."""
    beta = float(beta)
    if not np.isfinite(beta):
        raise ValueError("beta must be finite")
    E = np.asarray(spec.levels, dtype=float)
    alpha, w, mean, var = _moments(E, beta)
    return CanonicalSolution(
        beta=beta,
        alpha=alpha,
        weights=w,
        energy=mean,
        entropy=float(k_B * math.fsum(entr(w))),
        heat_capacity=float(k_B * beta ** 2 * var),
    )


def solve_beta(spec, E, tol=ENERGY_TOL, k_B=1.0, max_iter=500):
    """Find the canonical state with mean energy E.

    E(beta) is strictly decreasing, so the root is unique.  The root is
    bracketed by doubling from beta = 0, narrowed by bisection to width
    1e-2 and polished by Newton steps (dE/dbeta = -Var E) that fall
    back to bisection whenever they leave the bracket.
    """
    lv = np.asarray(spec.levels, dtype=float)
    lo_e, hi_e = float(lv[0]), float(lv[-1])
    if hi_e - lo_e <= spec.gap_tol:
        raise Degenerate("spectrum is a single repeated level")
    E = float(E)
    if not (lo_e < E < hi_e):
        raise OutOfRange("energy {!r} outside ({!r}, {!r})".format(E, lo_e, hi_e))

    def resid(b):
        _, _, mean, var = _moments(lv, b)
        return mean - E, var

    r0, _ = resid(0.0)
    if abs(r0) <= tol:
        return weights_at(spec, 0.0, k_B)
    # r(beta) decreases; r0 > 0 means the root has beta > 0
    sign = 1.0 if r0 > 0 else -1.0
    a, b = 0.0, sign
    while sign * resid(b)[0] > 0:
        a, b = b, 2 * b
        if abs(b) > 1e300:
            raise NoConvergence("could not bracket beta")
    lo, hi = min(a, b), max(a, b)
    while hi - lo > 1e-2:
        mid = 0.5 * (lo + hi)
        if resid(mid)[0] > 0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r, var = resid(beta)
        if abs(r) <= tol:
            return weights_at(spec, beta, k_B)
        if r > 0:
            lo = beta
        else:
            hi = beta
        step = beta + r / var if var > 0 else None
        if step is None or not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == beta:
            break
        beta = step
    r, _ = resid(beta)
    if abs(r) <= tol:
        return weights_at(spec, beta, k_B)
    raise NoConvergence("energy residual {!r} above tol {!r}".format(r, tol))


def thermo_consistency(spec, E, h, k_B=1.0, tol=ENERGY_TOL):
    """Centered difference dS/dE divided by k_B; approximates beta."""
    s_plus = solve_beta(spec, E + h, tol, k_B).entropy
    s_minus = solve_beta(spec, E - h, tol, k_B).entropy
    return (s_plus - s_minus) / (2 * h) / k_B
