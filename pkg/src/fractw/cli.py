"""Command line interface: check | solve | shoot | kernel | roots.

Bulk data goes to files (--out); a one-line JSON summary always goes to
stdout. Exit codes: 0 ok, 1 numerical failure, 2 usage, 3 admissibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .charroots import CharRoots, NoConvergence
from .flux import WaveConfig, admissibility_report, build_modified_flux
from .integrator import IntegrateOptions, Termination, integrate
from .kernel import PoleData, eval_v
from .shooting import (BracketBroken, NoBracket, ShootOptions, classify, shoot)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_ADMISSIBILITY = 3


def _emit(summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config_defaults(argv: list) -> dict:
    """Pre-scan for --config and return its key=value pairs."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    defaults = {}
    with open(known.config) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line: {raw!r}")
            key, value = line.split("=", 1)
            defaults[key.strip().replace("-", "_")] = value.strip()
    return defaults


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key=value file; flags override it")
    shared.add_argument("--alpha", type=float, default=0.9)
    shared.add_argument("--phi-minus", type=float, default=1.0)
    shared.add_argument("--phi-plus", type=float, default=-0.6)
    shared.add_argument("--dx", type=float, default=0.01)
    shared.add_argument("--xi-max", type=float, default=None,
                        help="absolute right endpoint (default: xi_start + length)")
    shared.add_argument("--length", type=float, default=500.0,
                        help="domain length when --xi-max is not given")
    shared.add_argument("--epsilon", type=float, default=1e-4)
    shared.add_argument("--blowdown-floor", type=float, default=-10.0)
    shared.add_argument("--memory-window", type=float, default=None,
                        help="approximate memory truncation in xi-units (off by default)")
    shared.add_argument("--out", help="output file for bulk data (CSV)")

    parser = argparse.ArgumentParser(
        prog="fractw",
        description="Travelling waves of the non-local generalised KdV-Burgers equation")
    parser.add_argument("--version", action="version", version=f"fractw {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    sub.add_parser("check", parents=[shared],
                   help="report admissibility predicates for the states")

    p_solve = sub.add_parser("solve", parents=[shared],
                             help="integrate one profile at a given tau")
    p_solve.add_argument("--tau", type=float, required=True)
    p_solve.add_argument("--flux", choices=["original", "modified"],
                         default="original")
    p_solve.add_argument("--cap-a", type=float, default=1.0)
    p_solve.add_argument("--cap-b", type=float, default=-10.0)

    p_shoot = sub.add_parser("shoot", parents=[shared],
                             help="bisect tau between classical and blow-down")
    p_shoot.add_argument("--stop-tol", type=float, default=None,
                         help="absolute bracket-width stop (default max(1e-14, 1e-12 tau))")
    p_shoot.add_argument("--tail-tol", type=float, default=None)
    p_shoot.add_argument("--max-iter", type=int, default=60)
    p_shoot.add_argument("--jobs", type=int, default=1,
                         help="parallel solves during the bracket scan")
    p_shoot.add_argument("--trajectory-dir",
                         help="write each bisection iteration's trajectory CSV here")

    p_kernel = sub.add_parser("kernel", parents=[shared],
                              help="tabulate the fundamental solution v(eta; tau)")
    p_kernel.add_argument("--tau", type=float, required=True)
    p_kernel.add_argument("--a", type=float, default=None,
                          help="linearisation coefficient (default |h'(phi_c)|)")
    p_kernel.add_argument("--eta-max", type=float, default=10.0)
    p_kernel.add_argument("--points", type=int, default=100)

    p_roots = sub.add_parser("roots", parents=[shared],
                             help="characteristic roots for given (tau, a, b, alpha)")
    p_roots.add_argument("--tau", type=float, required=True)
    p_roots.add_argument("--a", type=float, required=True)
    p_roots.add_argument("--b", type=float, default=1.0)

    return parser


def _integrate_options(args) -> IntegrateOptions:
    return IntegrateOptions(dx=args.dx, length=args.length, xi_max=args.xi_max,
                            epsilon=args.epsilon, blowdown_floor=args.blowdown_floor,
                            memory_window=args.memory_window)


def _cmd_check(args) -> int:
    report = admissibility_report(args.phi_minus, args.phi_plus)
    _emit(report.as_dict())
    return EXIT_OK


def _cmd_solve(args) -> int:
    report = admissibility_report(args.phi_minus, args.phi_plus)
    if not report.all_ok:
        print(f"warning: states not admissible: {report.as_dict()}", file=sys.stderr)
    if not report.ordering_ok:
        print("error: root ordering violated; no wave configuration", file=sys.stderr)
        return EXIT_NUMERICAL
    cfg = WaveConfig.from_states(args.phi_minus, args.phi_plus, args.alpha)
    modified = None
    if args.flux == "modified":
        modified = build_modified_flux(cfg, {"A": args.cap_a, "B": args.cap_b})
    traj = integrate(cfg, args.tau, _integrate_options(args),
                     flux_variant=args.flux, modified=modified)
    if args.out:
        traj.write_csv(args.out)
    cl = classify(traj)
    _emit({
        "mode": "solve", "tau": args.tau, "alpha": args.alpha,
        "terminated": traj.terminated.value, "verdict": cl.verdict.value,
        "tail_mean": cl.tail_mean, "xi_end": float(traj.xi[-1]),
        "phi_end": float(traj.phi_samples[-1]),
        "max_energy_residual": float(np.max(np.abs(traj.energy_residuals))),
        "out": args.out,
    })
    return EXIT_NUMERICAL if traj.terminated is Termination.NUMERICAL_FAILURE else EXIT_OK


def _cmd_shoot(args) -> int:
    report = admissibility_report(args.phi_minus, args.phi_plus)
    if not report.all_ok:
        print(f"error: states not admissible: {report.as_dict()}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    cfg = WaveConfig.from_states(args.phi_minus, args.phi_plus, args.alpha)
    opts = ShootOptions(
        integrate=_integrate_options(args), tail_tol=args.tail_tol,
        stop_tol=args.stop_tol, max_iter=args.max_iter, jobs=args.jobs)
    try:
        result = shoot(cfg, opts)
    except (NoBracket, BracketBroken) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    summary = {
        "mode": "shoot", "alpha": args.alpha,
        "phi_minus": args.phi_minus, "phi_plus": args.phi_plus,
        "tau_star": result.tau_star,
        "bracket": list(result.bracket_final),
        "iterations": result.iterations,
        "history": [[t, v.value] for t, v in result.history],
    }
    if args.trajectory_dir:
        os.makedirs(args.trajectory_dir, exist_ok=True)
        for i, (t, _) in enumerate(result.history):
            traj = integrate(cfg, t, opts.integrate)
            traj.write_csv(os.path.join(args.trajectory_dir, f"iter{i:03d}.csv"))
    if args.out:
        _atomic_write(args.out, json.dumps(summary, sort_keys=True, indent=2) + "\n")
    _emit(summary)
    return EXIT_OK


def _cmd_kernel(args) -> int:
    if args.a is None:
        cfg = WaveConfig.from_states(args.phi_minus, args.phi_plus, args.alpha)
        a = -cfg.h_prime_c
    else:
        a = args.a
    pole = PoleData.for_params(args.tau, a, args.alpha)
    etas = np.linspace(0.0, args.eta_max, args.points)
    rows = []
    for eta in etas:
        ev = eval_v(float(eta), args.tau, a, args.alpha, pole)
        rows.append((ev.eta, ev.v, ev.v_prime, ev.v_second))
    if args.out:
        lines = [f"# fractw kernel tau={args.tau!r} a={a!r} alpha={args.alpha!r}",
                 "eta,v,v_prime,v_second"]
        lines += [",".join(repr(float(x)) for x in row) for row in rows]
        _atomic_write(args.out, "\n".join(lines) + "\n")
    _emit({
        "mode": "kernel", "tau": args.tau, "a": a, "alpha": args.alpha,
        "points": args.points, "eta_max": args.eta_max,
        "s1_re": pole.p, "s1_im": pole.q, "v_at_eta_max": rows[-1][1],
        "out": args.out,
    })
    return EXIT_OK


def _cmd_roots(args) -> int:
    try:
        left = CharRoots.solve_left(args.tau, args.b, args.a, args.alpha)
        right = CharRoots.solve_right(args.tau, args.b, args.a, args.alpha)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit({
        "mode": "roots", "tau": args.tau, "a": args.a, "b": args.b,
        "alpha": args.alpha,
        "lambda": left.lam, "s1_re": right.s1.real, "s1_im": right.s1.imag,
        "residuals": {"left": left.residual, "right": right.residual},
    })
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "shoot": _cmd_shoot,
    "kernel": _cmd_kernel,
    "roots": _cmd_roots,
}


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    defaults = _load_config_defaults(argv)
    if defaults:
        for action in parser._subparsers._group_actions:
            for sub in action.choices.values():
                typed = {}
                for act in sub._actions:
                    if act.dest in defaults:
                        raw = defaults[act.dest]
                        typed[act.dest] = act.type(raw) if act.type else raw
                sub.set_defaults(**typed)
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.mode](args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
