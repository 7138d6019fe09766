"""Command-line driver.

    gqme [global flags] {nlevel,verify-ergodic,oscillator,coherent} [flags]

Global flags may also follow the subcommand.  Tables go to stdout (or
``--out``) as CSV with a header row or as JSON; warnings are JSON
records on stderr.  Exit status is 0 on success, 1 on solver or
validation failure and 2 on bad arguments.
"""
import argparse
from dataclasses import dataclass, field
import json
import math
import os
import sys
import warnings

import numpy as np

from . import canonical, phase_average
from ._validation import DEFAULT_TOLS
from .exceptions import GQMEError, OutOfRange
from .hilbert import Spectrum, normalize
from .oscillator import (
    OscillatorConfig, asymptotic_profile, classical_energy, coherent_state,
    ladder_observables, phase_portrait, solve_targets, solve_two_constraint,
)


@dataclass
class RunConfig:
    hbar: float = 1.0
    m: float = 1.0
    omega: float = 1.0
    k_B: float = 1.0
    seed: int = 0
    out: str = None
    format: str = "csv"
    tols: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))


def fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def warn(record, stream=None):
    stream = sys.stderr if stream is None else stream
    stream.write(json.dumps(dict(record, level="warning"), sort_keys=True) + "\n")


def emit_table(header, rows, rc, stream=None, path=None):
    """Write rows as CSV or JSON to path, rc.out or stdout."""
    if rc.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    else:
        lines = [",".join(header)] + [",".join(fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    path = path or rc.out
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def cmd_nlevel(args, rc):
    levels = sorted(float(x) for x in args.levels.split(","))
    spec = Spectrum(np.array(levels), hbar=rc.hbar, gap_tol=rc.tols["gap_tol"])
    lo, hi = args.range
    rows = []
    for E in np.linspace(lo, hi, args.count):
        try:
            sol = canonical.solve_beta(spec, E, rc.tols["energy_tol"], rc.k_B)
        except OutOfRange as exc:
            warn({"skip": "row", "E": float(E), "reason": str(exc)})
            continue
        rows.append((float(E), sol.beta, sol.entropy, sol.heat_capacity))
    emit_table(["E", "beta", "S", "C"], rows, rc)
    return 0


def _random_hermitian(rng, d):
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (M + M.conj().T) / 2


def gap_nondegenerate_levels(rng, dim, gap_tol):
    """Levels n + u_n with u_n irrational-looking offsets, redrawn until gaps are distinct."""
    while True:
        lv = np.sort(np.arange(dim) + rng.uniform(0.05, 0.95, dim) * math.sqrt(2) / 2)
        spec = Spectrum(lv, gap_tol=gap_tol)
        if not spec.gap_degenerate:
            return spec


def cmd_verify_ergodic(args, rc):
    rng = np.random.default_rng(rc.seed)
    spec = gap_nondegenerate_levels(rng, args.dim, rc.tols["gap_tol"])
    if args.eigenstate is not None:
        psi = np.zeros(args.dim, dtype=complex)
        psi[args.eigenstate] = 1.0
    else:
        psi = normalize(rng.normal(size=args.dim) + 1j * rng.normal(size=args.dim))
    A = _random_hermitian(rng, args.dim)
    B = _random_hermitian(rng, args.dim)
    rows = []
    ok = True
    for name, f, analytic in (
        ("linear", phase_average.StateFunction.linear(A), phase_average.linear_analytic(psi, A)),
        ("covariance", phase_average.StateFunction.covariance(A, B), phase_average.covariance_analytic(psi, A, B)),
    ):
        grid = phase_average.torus_average_grid(f, psi, amp_floor=rc.tols["amp_floor"]).value
        tav = phase_average.time_average(f, psi, spec, T=args.T).value
        C, _ = phase_average.fourier_envelope(f, psi, spec, amp_floor=rc.tols["amp_floor"])
        rows.append((name, tav, grid, analytic, abs(analytic - grid), abs(tav - grid), C / args.T))
        ok &= abs(analytic - grid) <= 1e-10
    emit_table(["function", "time", "grid", "analytic", "analytic_vs_grid", "time_vs_grid", "envelope"],
               rows, rc)
    return 0 if ok else 1


def _osc_cfg(rc, N):
    return OscillatorConfig(rc.m, rc.omega, rc.hbar, N, rc.tols["tail_tol"])


def cmd_oscillator(args, rc):
    cfg = _osc_cfg(rc, args.N)
    if args.energy is not None or args.classical is not None:
        sol = solve_targets(args.energy, args.classical, cfg, solver_tol=rc.tols["solver_tol"])
    else:
        sol = solve_two_constraint(args.beta, args.gamma, args.lambda0, cfg,
                                   solver_tol=rc.tols["solver_tol"])
    body = sol.to_dict()
    profile = None
    if sol.gamma > 0:
        try:
            profile = asymptotic_profile(sol, 0.0)
            body["ratio_drift"] = profile.ratio_drift
        except GQMEError as exc:
            warn({"skip": "profile", "reason": str(exc)})
    else:
        warn({"skip": "profile", "reason": "gamma = 0 has no asymptotic profile"})
    t, q, p = phase_portrait(sol.state.astype(complex), cfg, args.samples)
    text = json.dumps(body, indent=1, sort_keys=True) + "\n"
    if rc.out is None:
        sys.stdout.write(text)
        return 0
    os.makedirs(rc.out, exist_ok=True)
    _write(os.path.join(rc.out, "solution.json"), text)
    csv = RunConfig(format="csv")
    emit_table(["n", "weight"], list(enumerate(sol.weights)), csv, path=os.path.join(rc.out, "weights.csv"))
    prows = [] if profile is None else list(zip(profile.n, profile.x))
    emit_table(["n", "x_n"], prows, csv, path=os.path.join(rc.out, "profile.csv"))
    emit_table(["t", "q", "p"], list(zip(t, q, p)), csv, path=os.path.join(rc.out, "portrait.csv"))
    return 0


def cmd_coherent(args, rc):
    cfg = _osc_cfg(rc, args.N)
    z = math.sqrt(args.z_sq) * complex(math.cos(args.phase), math.sin(args.phase))
    psi = coherent_state(z, cfg)
    Q, P = ladder_observables(cfg)
    H = np.diag(cfg.levels())
    E = float(np.vdot(psi, H @ psi).real)
    _, q, p = phase_portrait(psi, cfg, args.samples)
    r = math.sqrt(args.z_sq)
    rows = [
        ("E", E, cfg.hw * (0.5 + args.z_sq)),
        ("E_cl", classical_energy(psi, cfg), cfg.hw * args.z_sq),
        ("Q_max", float(np.max(np.abs(q))), cfg.lam_Q * r),
        ("P_max", float(np.max(np.abs(p))), cfg.lam_P * r),
    ]
    emit_table(["quantity", "computed", "predicted"], rows, rc)
    return 0


def _tol(text):
    name, sep, value = text.partition("=")
    if not sep or name not in DEFAULT_TOLS:
        raise argparse.ArgumentTypeError(
            "expected name=value with name in {}".format(", ".join(sorted(DEFAULT_TOLS))))
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError("bad tolerance value {!r}".format(value))
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return name, v


def _positive(text):
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI")
    return lo, hi


def _global_flags(parser, default):
    """Add the shared flags; with default=SUPPRESS they only override."""
    def d(v):
        return default if default is argparse.SUPPRESS else v

    parser.add_argument("--hbar", type=_positive, default=d(1.0))
    parser.add_argument("--mass", type=_positive, default=d(1.0))
    parser.add_argument("--omega", type=_positive, default=d(1.0))
    parser.add_argument("--kb", type=_positive, default=d(1.0))
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--out", default=d(None))
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    parser.add_argument("--tol", type=_tol, action="append", default=d([]), metavar="NAME=VALUE")


def build_parser():
    parser = argparse.ArgumentParser(prog="gqme", description="Microcanonical averages and maximum-entropy ensembles.")
    _global_flags(parser, None)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nlevel", parents=[common], help="canonical sweep on a finite spectrum")
    p.add_argument("--levels", required=True, help="comma-separated energies")
    p.add_argument("--range", type=_range, required=True, help="LO,HI energies (inclusive)")
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_nlevel)

    p = sub.add_parser("verify-ergodic", parents=[common], help="time vs torus vs closed form")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--T", type=_positive, default=1e4)
    p.add_argument("--eigenstate", type=int, default=None)
    p.set_defaults(func=cmd_verify_ergodic)

    p = sub.add_parser("oscillator", parents=[common], help="two-constraint oscillator ensemble")
    p.add_argument("--beta", type=_positive, default=1.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--lambda0", type=float, default=None)
    p.add_argument("--energy", type=_positive, default=None, help="target energy (with --classical)")
    p.add_argument("--classical", type=_positive, default=None, help="target classical energy")
    p.add_argument("-N", type=int, default=60)
    p.add_argument("--samples", type=int, default=64, help="portrait points")
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("coherent", parents=[common], help="coherent-state checks")
    p.add_argument("--z-sq", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("-N", type=int, default=40)
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_coherent)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-ergodic":
        if not 2 <= args.dim <= 6:
            parser.error("--dim must be between 2 and 6")
        if args.eigenstate is not None and not 0 <= args.eigenstate < args.dim:
            parser.error("--eigenstate must index a level")
    if args.command == "oscillator" and (args.energy is None) != (args.classical is None):
        parser.error("--energy and --classical go together")
    tols = dict(DEFAULT_TOLS)
    tols.update(dict(args.tol))
    rc = RunConfig(hbar=args.hbar, m=args.mass, omega=args.omega, k_B=args.kb, seed=args.seed,
                   out=args.out, format=args.format, tols=tols)
    caught = []
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            return args.func(args, rc)
    except GQMEError as exc:
        sys.stderr.write(json.dumps({"level": "error", "type": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(json.dumps({"level": "error", "type": "ValueError", "message": str(exc)}) + "\n")
        return 1
    finally:
        for w in caught:
            warn({"type": w.category.__name__, "message": str(w.message)})


if __name__ == "__main__":
    sys.exit(main())
