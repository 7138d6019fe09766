"""Harmonic oscillator: coherent states, classical energy, two-constraint ensemble.

The two-constraint stationarity condition is solved in log space,
u_n = ln lambda_n, in the gauge where all amplitudes are real and
nonnegative.  With g = gamma hbar omega zeta the n-th component reads

    -2 u_n - 1 - alpha - beta E_n
        - g (sqrt(n+1) exp(u_{n+1} - u_n) + sqrt(n) exp(u_{n-1} - u_n)) = 0

with lambda_N = 0 at the truncation edge.  Running this forward in n is
numerically useless: the growing solution swamps the decaying one
within a few steps.  Run backward from the edge it is stable, so the
solver shoots on (u_{N-1}, g) and closes the two remaining conditions
(the n = 0 component and g = gamma hbar omega zeta).
"""
from dataclasses import dataclass, field
import json
import math
import warnings

import numpy as np
from scipy.optimize import brentq, root
from scipy.special import gammaln, logsumexp
from scipy.stats import poisson

from ._validation import AMP_FLOOR, SOLVER_TOL, TAIL_TOL, check_int, check_positive, check_vector
from .canonical import entropy as _entropy
from .canonical import weights_at
from .exceptions import (
    DimensionMismatch, GQMEError, InsufficientTail, NoConvergence, NonPositiveAmplitude, OutOfRange,
    TruncationTooSmall,
)
from .hilbert import Spectrum


class BranchWarning(UserWarning):
    """The solution branch found does not match the requested lambda_0."""


@dataclass(frozen=True)
class OscillatorConfig:
    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    N: int = 40
    tail_tol: float = TAIL_TOL

    def __post_init__(self):
        for name in ("m", "omega", "hbar", "tail_tol"):
            check_positive(getattr(self, name), name)
        check_int(self.N, "N", lo=2)

    @property
    def hw(self):
        return self.hbar * self.omega

    @property
    def lam_Q(self):
        return math.sqrt(2 * self.hbar / (self.m * self.omega))

    @property
    def lam_P(self):
        return math.sqrt(2 * self.hbar * self.m * self.omega)

    def levels(self):
        return self.hw * (np.arange(self.N) + 0.5)


def oscillator_spectrum(cfg):
    return Spectrum(cfg.levels(), hbar=cfg.hbar)


def annihilation(N):
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1)


def ladder_observables(cfg):
    """Position and momentum matrices in the number basis."""
    a = annihilation(cfg.N)
    Q = cfg.lam_Q * (a + a.T) / 2 + 0j
    P = cfg.lam_P * (a - a.T) / 2j
    return Q, P


def coherent_state(z, cfg):
    """Truncated coherent state, renormalized after truncation."""
    z = complex(z)
    r2 = abs(z) ** 2
    tail = float(poisson.sf(cfg.N - 1, r2))
    if tail > cfg.tail_tol:
        raise TruncationTooSmall(
            "Poisson weight {:.3g} beyond N={} exceeds tail_tol {:.3g}".format(tail, cfg.N, cfg.tail_tol))
    n = np.arange(cfg.N)
    if r2 == 0:
        out = np.zeros(cfg.N, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -r2 / 2 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1)
    amps = np.exp(logmag) * np.exp(1j * n * np.angle(z))
    return amps / np.linalg.norm(amps)


def zeta(psi):
    """sum_n conj(lambda_{n+1}) lambda_n sqrt(n+1)."""
    psi = check_vector(psi, "state")
    return complex(np.sum(np.conj(psi[1:]) * psi[:-1] * np.sqrt(np.arange(1, psi.size))))


def classical_energy(psi, cfg):
    """hbar omega |zeta|^2."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (cfg.N,):
        raise DimensionMismatch("state length {} vs N={}".format(psi.size, cfg.N))
    return cfg.hw * abs(zeta(psi)) ** 2


def classical_energy_qp(psi, cfg):
    """<P>^2/2m + m omega^2 <Q>^2/2 from the ladder matrices."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (cfg.N,):
        raise DimensionMismatch("state length {} vs N={}".format(psi.size, cfg.N))
    Q, P = ladder_observables(cfg)
    q = np.vdot(psi, Q @ psi).real
    p = np.vdot(psi, P @ psi).real
    return p ** 2 / (2 * cfg.m) + cfg.m * cfg.omega ** 2 * q ** 2 / 2


def phase_portrait(psi, cfg, samples=64):
    """(t, <Q>_t, <P>_t) over one period from the exact Heisenberg rotation."""
    samples = check_int(samples, "samples", lo=4)
    Q, P = ladder_observables(cfg)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (cfg.N,):
        raise DimensionMismatch("state length {} vs N={}".format(psi.size, cfg.N))
    q0 = np.vdot(psi, Q @ psi).real
    p0 = np.vdot(psi, P @ psi).real
    t = 2 * np.pi * np.arange(samples) / (samples * cfg.omega)
    c, s = np.cos(cfg.omega * t), np.sin(cfg.omega * t)
    mw = cfg.m * cfg.omega
    return t, q0 * c + p0 / mw * s, p0 * c - mw * q0 * s


def random_shell_states(cfg, energy, count, rng, support=None):
    """Random normalized states with <H> = energy.

    Each draw starts from a random complex vector on the first
    ``support`` levels and mixes in the level 0 or the top level until
    the mean energy hits the target exactly.
    """
    E = cfg.levels()
    support = cfg.N if support is None else support
    if not E[0] < energy < E[support - 1]:
        raise ValueError("energy {!r} not inside the levels of the first {} modes".format(energy, support))
    out = []
    while len(out) < count:
        v = np.zeros(cfg.N, dtype=complex)
        v[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
        v /= np.linalg.norm(v)
        w = np.abs(v) ** 2
        e = float(np.dot(w, E))
        # pair v with a basis state on the other side of the target energy
        k = 0 if e > energy else support - 1
        if (E[k] - energy) * (e - energy) >= 0:
            continue
        t = (energy - e) / (E[k] - e)
        mix = np.sqrt(1 - t) * v
        mix[k] = np.sqrt(max(0.0, (1 - t) * w[k] + t)) * np.exp(1j * np.angle(v[k]))
        mix /= np.linalg.norm(mix)
        out.append(mix)
    return np.array(out)


# ---------------------------------------------------------------------------
# two-constraint ensemble


@dataclass(frozen=True)
class EnsembleSolution:
    """Converged amplitudes and multipliers of the two-constraint ensemble.

    ``log_amps`` keeps the deep tail that underflows in ``state``.
    """

    state: np.ndarray
    log_amps: np.ndarray
    alpha: float
    beta: float
    gamma: float
    zeta: float
    energy: float
    classical_energy: float
    residual: float
    iterations: int
    cfg: OscillatorConfig = field(repr=False)

    @property
    def lambda0(self):
        return float(self.state[0])

    @property
    def weights(self):
        return self.state ** 2

    @property
    def entropy(self):
        w = self.weights
        return _entropy(w / w.sum())

    def to_dict(self):
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "lambda0": self.lambda0,
            "zeta": self.zeta,
            "energy": self.energy,
            "classical_energy": self.classical_energy,
            "entropy": self.entropy,
            "residual": self.residual,
            "iterations": self.iterations,
            "N": self.cfg.N,
            "amps": [float(x) for x in self.state],
            "log_amps": [float(x) for x in self.log_amps],
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def vareq_residual(log_amps, alpha, beta, gamma, cfg, zeta_value=None):
    """Componentwise residual of the stationarity equation in log form."""
    u = np.asarray(log_amps, dtype=float)
    N = u.size
    E = cfg.hw * (np.arange(N) + 0.5)
    s = np.sqrt(np.arange(1, N, dtype=float))
    if zeta_value is None:
        zeta_value = math.fsum(s * np.exp(u[1:] + u[:-1]))
    g = gamma * cfg.hw * zeta_value
    up = np.zeros(N)
    up[:-1] = s * np.exp(u[1:] - u[:-1])
    dn = np.zeros(N)
    dn[1:] = s * np.exp(u[:-1] - u[1:])
    return -2 * u - 1 - alpha - beta * E - g * (up + dn)


def forward_recurrence(lambda0, alpha, beta, gamma, zeta_value, cfg, floor=AMP_FLOOR):
    """Generate amplitudes forward from lambda_0.

    Kept as a diagnostic.  Stops once an amplitude drops below
    ``floor`` and raises NonPositiveAmplitude if one turns negative
    first, which for generic inputs happens within a few steps.
    """
    g = gamma * cfg.hw * zeta_value
    if g <= 0:
        raise ValueError("forward recurrence needs gamma * zeta > 0")
    E = cfg.levels()
    lam = np.zeros(cfg.N)
    lam[0] = lambda0
    for n in range(cfg.N - 1):
        prev = lam[n - 1] * math.sqrt(n) if n > 0 else 0.0
        lam[n + 1] = (lam[n] * (-math.log(lam[n] ** 2) - 1 - alpha - beta * E[n]) / g - prev) / math.sqrt(n + 1)
        if lam[n + 1] < 0 and abs(lam[n + 1]) > floor:
            raise NonPositiveAmplitude("amplitude {} turned negative ({!r})".format(n + 1, lam[n + 1]))
        if abs(lam[n + 1]) <= floor:
            lam[n + 1:] = 0.0
            break
    return lam


class _Problem:
    """Stationarity system in units of hbar omega (b = beta hbar omega, G = gamma hbar omega)."""

    def __init__(self, b, G, N):
        self.b, self.G, self.N = b, G, N
        self.n = np.arange(N)
        self.E = self.n + 0.5
        self.s = np.sqrt(self.n[1:].astype(float))

    def back(self, U, g):
        """Backward sweep from u_{N-1} = U in the alpha = 0 gauge.

        Vectorized over U; returns the n = 0 residual and the sequence.
        """
        U = np.atleast_1d(np.asarray(U, dtype=float))
        N = self.N
        u = np.full((N, U.size), np.nan)
        u[N - 1] = U
        nxt = np.zeros(U.size)
        bad = np.zeros(U.size, bool)
        with np.errstate(all="ignore"):
            for k in range(N - 1, 0, -1):
                rhs = -2 * u[k] - 1 - self.b * (k + 0.5) - nxt
                bad |= ~(rhs > 0)
                rhs = np.where(rhs > 0, rhs, np.nan)
                u[k - 1] = u[k] + np.log(rhs / (g * math.sqrt(k)))
                nxt = g * math.sqrt(k) * np.exp(u[k] - u[k - 1])
            R = -2 * u[0] - 1 - 0.5 * self.b - nxt
        R[bad] = np.nan
        return R, u

    def gauge(self, u):
        """Shift to unit norm; returns (u, alpha, zeta)."""
        s = -0.5 * logsumexp(2 * u)
        un = u + s
        z = math.fsum(self.s * np.exp(un[1:] + un[:-1]))
        return un, -2 * s, z

    def F(self, u, alpha, G=None):
        G = self.G if G is None else G
        lam = np.exp(u)
        z = math.fsum(self.s * lam[1:] * lam[:-1])
        up = np.zeros(self.N)
        up[:-1] = self.s * np.exp(u[1:] - u[:-1])
        dn = np.zeros(self.N)
        dn[1:] = self.s * np.exp(u[:-1] - u[1:])
        r = -2 * u - 1 - alpha - self.b * self.E - G * z * (up + dn)
        return np.append(r, math.fsum(lam ** 2) - 1.0)

    def J(self, u, alpha, G=None):
        """Jacobian of F with respect to (u, alpha, G)."""
        G = self.G if G is None else G
        N = self.N
        lam = np.exp(u)
        z = math.fsum(self.s * lam[1:] * lam[:-1])
        g = G * z
        up = np.zeros(N)
        up[:-1] = self.s * np.exp(u[1:] - u[:-1])
        dn = np.zeros(N)
        dn[1:] = self.s * np.exp(u[:-1] - u[1:])
        M = np.zeros((N + 1, N + 2))
        i = np.arange(N)
        M[i, i] = -2 + g * (up + dn)
        M[i[:-1], i[1:]] = -g * up[:-1]
        M[i[1:], i[:-1]] = -g * dn[1:]
        dz = np.zeros(N)
        pair = self.s * lam[1:] * lam[:-1]
        dz[:-1] += pair
        dz[1:] += pair
        M[:N, :N] -= G * np.outer(up + dn, dz)
        M[:N, N] = -1.0
        M[:N, N + 1] = -z * (up + dn)
        M[N, :N] = 2 * lam ** 2
        return M

    def newton(self, u, alpha, tol, max_iter=30):
        """Dense Newton at fixed G; returns (u, alpha, residual, iterations) or None."""
        best = None
        for it in range(max_iter):
            with np.errstate(over="ignore", invalid="ignore"):
                f = self.F(u, alpha)
                jac = self.J(u, alpha)[:, :-1]
            if not (np.all(np.isfinite(f)) and np.all(np.isfinite(jac))):
                return best
            res = float(np.max(np.abs(f)))
            if best is None or res < best[2]:
                best = (u.copy(), alpha, res, it)
            if res <= tol * 1e-2:
                break
            step = np.linalg.lstsq(jac, f, rcond=None)[0]
            if np.max(np.abs(step)) < 1e-14:
                break
            u = u - step[:-1]
            alpha = alpha - step[-1]
        return best

    def scan(self, gs, M):
        """Shooting roots over a grid of g; each yields a candidate solution."""
        N = self.N
        Us = np.linspace(-6 * N * math.log(N), -5.0, M)
        out = []
        for g in gs:
            R, _ = self.back(Us, g)
            ok = np.isfinite(R[:-1]) & np.isfinite(R[1:]) & (np.sign(R[:-1]) != np.sign(R[1:]))
            for i in np.flatnonzero(ok):
                try:
                    U = brentq(lambda x: self.back(x, g)[0][0], Us[i], Us[i + 1], xtol=1e-13)
                except ValueError:
                    continue
                u = self.back(U, g)[1][:, 0]
                if not np.all(np.isfinite(u)):
                    continue
                un, al, z = self.gauge(u)
                out.append({"g": g, "U": U, "G": g / z, "u": un, "alpha": al})
        return out

    def shoot(self, cand):
        """Solve n = 0 residual and g = G zeta for (U, ln g) from a candidate."""

        def fun(x):
            R, u = self.back(x[0], math.exp(x[1]))
            if not np.isfinite(R[0]):
                return [1e3, 1e3]
            _, _, z = self.gauge(u[:, 0])
            return [R[0], math.log(math.exp(x[1]) / z / self.G)]

        sol = root(fun, [cand["U"], math.log(cand["g"])], method="hybr", options={"xtol": 1e-14})
        if not np.all(np.abs(sol.fun) < 1e-8):
            return None
        u = self.back(sol.x[0], math.exp(sol.x[1]))[1][:, 0]
        un, al, _ = self.gauge(u)
        return un, al, int(sol.nfev)

    def continuation(self, cand, tol, ds=0.02, max_steps=400):
        """Pseudo-arclength continuation in G from a candidate to self.G."""
        N = self.N
        X = np.concatenate([cand["u"], [cand["alpha"], cand["G"]]])
        target = self.G

        def tangent(M, prev=None):
            q, _ = np.linalg.qr(M.T, mode="complete")
            t = q[:, -1]
            if prev is not None and t @ prev < 0:
                t = -t
            return t

        t = tangent(self.J(X[:N], X[N], X[N + 1]))
        if (t[-1] > 0) != (target > X[-1]):
            t = -t
        for step in range(max_steps):
            Y = X + ds * t
            ok = False
            for _ in range(25):
                r = np.append(self.F(Y[:N], Y[N], Y[N + 1]), t @ (Y - X) - ds)
                if not np.all(np.isfinite(r)):
                    break
                if np.max(np.abs(r)) < tol:
                    ok = True
                    break
                Y = Y - np.linalg.solve(np.vstack([self.J(Y[:N], Y[N], Y[N + 1]), t]), r)
            if not ok:
                ds *= 0.5
                if ds < 1e-10:
                    return None
                continue
            if (Y[-1] - target) * (X[-1] - target) <= 0:
                w = (target - X[-1]) / (Y[-1] - X[-1])
                Z = X + w * (Y - X)
                best = self.newton(Z[:N], Z[N], tol)
                if best is None:
                    return None
                return best[0], best[1], step + best[3]
            t = tangent(self.J(Y[:N], Y[N], Y[N + 1]), t)
            X = Y
            ds = min(ds * 1.5, 0.5)
        return None


def _finish(u, alpha, beta, gamma, cfg, iterations, solver_tol):
    lam = np.exp(u)
    s = np.sqrt(np.arange(1, cfg.N, dtype=float))
    z = math.fsum(s * lam[1:] * lam[:-1])
    res = vareq_residual(u, alpha, beta, gamma, cfg, z)
    resid = float(np.max(np.abs(res)))
    if lam[-1] ** 2 > cfg.tail_tol:
        raise TruncationTooSmall(
            "top weight {:.3g} exceeds tail_tol {:.3g}; increase N".format(lam[-1] ** 2, cfg.tail_tol))
    E = cfg.levels()
    w = lam ** 2
    return EnsembleSolution(
        state=lam,
        log_amps=np.asarray(u, dtype=float),
        alpha=float(alpha),
        beta=float(beta),
        gamma=float(gamma),
        zeta=float(z),
        energy=float(np.dot(w, E)),
        classical_energy=float(cfg.hw * z ** 2),
        residual=resid,
        iterations=int(iterations),
        cfg=cfg,
    )


def _objective(u, beta, gamma, cfg):
    """S - beta E - gamma E_cl for normalized log amplitudes (k_B = 1)."""
    w = np.exp(2 * u)
    s = np.sqrt(np.arange(1, u.size, dtype=float))
    z = math.fsum(s * np.exp(u[1:] + u[:-1]))
    return math.fsum(-2 * u * w) - beta * float(np.dot(w, cfg.levels())) - gamma * cfg.hw * z ** 2


def _resize(u, N):
    """Truncate or extend log amplitudes to length N.

    Extension continues the last step with a growing decrement, which
    mimics the super-exponential tail well enough for a Newton start.
    """
    u = np.asarray(u, dtype=float)
    if u.size >= N:
        return u[:N].copy()
    out = list(u)
    d = min(u[-1] - u[-2], -1.0)
    while len(out) < N:
        d -= abs(d) / len(out)
        out.append(out[-1] + d)
    return np.array(out)


def solve_two_constraint(beta, gamma, lambda0=None, cfg=None, solver_tol=SOLVER_TOL,
                         initial=None, n_g=36, n_u=20000, max_candidates=10):
    """Maximum-entropy state at fixed energy and classical energy.

    Returns the real nonnegative amplitudes solving the stationarity
    equation together with normalization and zeta self-consistency.

    For gamma > 0 the equation has several discrete solution branches at
    the same (beta, gamma), told apart by lambda_0.  ``lambda0`` picks
    the branch whose lambda_0 is closest to it (a BranchWarning is
    issued if that differs by more than 1e-6).  By default the branch
    with the largest S - beta E - gamma E_cl is returned, i.e. the best
    of the stationary points found.  ``initial`` is a previous solution
    (any N) used as a Newton start before any search.

    gamma = 0 gives the canonical weights in closed form.
    """
    cfg = OscillatorConfig() if cfg is None else cfg
    beta = check_positive(beta, "beta")
    gamma = float(gamma)
    if not (np.isfinite(gamma) and gamma >= 0):
        raise ValueError("gamma must be finite and >= 0, got {!r}".format(gamma))
    if lambda0 is not None:
        lambda0 = float(lambda0)
        if not (0 < lambda0 <= 1):
            raise ValueError("lambda0 must lie in (0, 1], got {!r}".format(lambda0))
    spec = oscillator_spectrum(cfg)
    if gamma == 0:
        can = weights_at(spec, beta)
        u = 0.5 * (-can.alpha - beta * spec.levels)
        sol = _finish(u, can.alpha - 1.0, beta, 0.0, cfg, 0, solver_tol)
        if lambda0 is not None and abs(sol.lambda0 - lambda0) > 1e-6:
            warnings.warn("gamma = 0 fixes lambda0 = {:.12g}, requested {:.12g}".format(
                sol.lambda0, lambda0), BranchWarning, stacklevel=2)
        return sol

    prob = _Problem(beta * cfg.hw, gamma * cfg.hw, cfg.N)
    if initial is not None:
        u0 = _resize(initial.log_amps, cfg.N)
        best = prob.newton(u0, initial.alpha, solver_tol)
        if best is not None and best[2] <= solver_tol:
            sol = _finish(best[0], best[1], beta, gamma, cfg, best[3], solver_tol)
            if sol.residual <= solver_tol:
                return sol

    G = prob.G
    cands = prob.scan(np.geomspace(0.02 * G, 20 * G, n_g), n_u)
    cands.sort(key=lambda c: abs(math.log(c["G"] / G)))
    found = []
    for c in cands[:max_candidates]:
        out = prob.shoot(c)
        if out is None:
            continue
        un, al, nfev = out
        best = prob.newton(un, al, solver_tol)
        if best is None or best[2] > solver_tol:
            continue
        if all(abs(math.exp(best[0][0]) - math.exp(f[0][0])) > 1e-8 for f in found):
            found.append((best[0], best[1], nfev + best[3]))
    if not found:
        for c in cands[:max_candidates]:
            out = prob.continuation(c, solver_tol)
            if out is not None and np.max(np.abs(prob.F(out[0], out[1]))) <= solver_tol:
                found.append(out)
                break
    if not found:
        raise NoConvergence("no solution found for beta={!r}, gamma={!r} at N={}".format(
            beta, gamma, cfg.N))
    if lambda0 is not None:
        u, al, its = min(found, key=lambda f: abs(math.exp(f[0][0]) - lambda0))
    else:
        u, al, its = max(found, key=lambda f: _objective(f[0], beta, gamma, cfg))
    sol = _finish(u, al, beta, gamma, cfg, its, solver_tol)
    if sol.residual > solver_tol:
        raise NoConvergence("residual {:.3g} above solver_tol".format(sol.residual))
    if lambda0 is not None and abs(sol.lambda0 - lambda0) > 1e-6:
        warnings.warn("nearest solution branch has lambda0 = {:.12g}, requested {:.12g}".format(
            sol.lambda0, lambda0), BranchWarning, stacklevel=2)
    return sol


def _track(prev, beta, gamma, cfg, solver_tol, depth=6):
    """Newton-continue ``prev`` to (beta, gamma), halving the step on failure.

    Stays on the branch of ``prev``; returns None if it cannot.
    """
    if gamma <= 0:
        return None
    prob = _Problem(beta * cfg.hw, gamma * cfg.hw, cfg.N)
    best = prob.newton(_resize(prev.log_amps, cfg.N), prev.alpha, solver_tol)
    if best is not None and best[2] <= solver_tol:
        try:
            sol = _finish(best[0], best[1], beta, gamma, cfg, best[3], solver_tol)
        except GQMEError:
            return None
        if sol.residual <= solver_tol and abs(sol.lambda0 - prev.lambda0) < 0.05:
            return sol
    if depth == 0:
        return None
    mid = _track(prev, math.sqrt(prev.beta * beta), math.sqrt(prev.gamma * gamma), cfg,
                 solver_tol, depth - 1)
    return None if mid is None else _track(mid, beta, gamma, cfg, solver_tol, depth - 1)


_TARGET_SEEDS = ((1.0, 0.5), (0.5, 0.5), (2.0, 0.5), (0.5, 0.2), (1.0, 1.0), (0.3, 1.0))


def solve_targets(energy, classical, cfg=None, beta0=1.0, gamma0=0.5, solver_tol=SOLVER_TOL):
    """Find (beta, gamma) whose solution has the given energies.

    Convenience root-find.  Each evaluation continues the previous
    solution along its branch, so the map seen by the root finder is
    continuous; a few starting points are tried in turn.
    """
    cfg = OscillatorConfig() if cfg is None else cfg
    if not (energy > classical + cfg.hw / 2 and classical > 0):
        raise OutOfRange("need 0 < classical < energy - hbar omega / 2")
    message = "no starting point"
    for b0, g0 in ((beta0, gamma0),) + _TARGET_SEEDS:
        try:
            start = solve_two_constraint(b0, g0, cfg=cfg, solver_tol=solver_tol)
        except (NoConvergence, TruncationTooSmall):
            continue
        state = {"sol": start}

        def fun(x):
            sol = _track(state["sol"], math.exp(x[0]), math.exp(x[1]), cfg, solver_tol)
            if sol is None:
                return [1e3, 1e3]
            state["sol"] = sol
            return [sol.energy / energy - 1.0, sol.classical_energy / classical - 1.0]

        res = root(fun, [math.log(b0), math.log(g0)], method="hybr", options={"xtol": 1e-13})
        if np.all(np.abs(res.fun) < 1e-9):
            sol = _track(state["sol"], math.exp(res.x[0]), math.exp(res.x[1]), cfg, solver_tol)
            if sol is not None:
                return sol
        message = res.message
    raise NoConvergence("target energies not reached: {}".format(message))


@dataclass(frozen=True)
class AsymptoticProfile:
    n: np.ndarray
    log_x: np.ndarray
    ratio_drift: float

    def window_drift(self, width):
        """max |x_{n+1}/x_n - 1| over consecutive windows of ``width`` ratios."""
        r = np.abs(np.expm1(np.diff(self.log_x)))
        return np.array([r[i:i + width].max() for i in range(0, r.size - width + 1, width)])

    @property
    def x(self):
        return np.exp(self.log_x)

    def to_dict(self):
        return {"n": [int(k) for k in self.n], "x": [float(v) for v in self.x],
                "ratio_drift": self.ratio_drift}


def _log_c(n_max):
    """ln c_n for n = 0..n_max with c_n = prod_{p=2}^n sqrt(p) ln sqrt(p)."""
    p = np.arange(2, n_max + 1, dtype=float)
    terms = 0.5 * np.log(p) + np.log(0.5 * np.log(p))
    return np.concatenate([[0.0, 0.0], np.cumsum(terms)])


def asymptotic_profile(sol, amp_floor=AMP_FLOOR, edge=0):
    """x_n = lambda_n c_n / q^n with q = gamma zeta hbar omega / 2, for n >= 2.

    Uses the stored log amplitudes, so ``amp_floor`` may go far below
    the double-precision range.  ``edge`` drops that many modes at the
    truncation edge.
    """
    if not (sol.gamma > 0 and sol.zeta > 0):
        raise ValueError("asymptotic profile needs gamma > 0 and zeta > 0")
    u = np.asarray(sol.log_amps, dtype=float)
    hw = sol.cfg.hw
    log_floor = math.log(amp_floor) if amp_floor > 0 else -np.inf
    keep = np.flatnonzero(u > log_floor)
    n_max = int(keep.max()) if keep.size else 0
    n_max = min(n_max, u.size - 1 - edge)
    n = np.arange(2, n_max + 1)
    if n.size < 8:
        raise InsufficientTail("only {} usable x_n (need 8)".format(n.size))
    logq = math.log(sol.gamma * sol.zeta * hw / 2)
    log_x = u[n] + _log_c(n_max)[n] - n * logq
    r = np.abs(np.expm1(np.diff(log_x)))
    q = r[-max(1, r.size // 4):]
    return AsymptoticProfile(n=n, log_x=log_x, ratio_drift=float(q.max()))
