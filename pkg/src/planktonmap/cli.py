"""Command-line front end.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines named
after the long flags (dashes or underscores); explicit flags win over the file.
Exit codes: 0 success, 1 validation error, 2 runtime or I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .control import ControlGains, control_triangle, is_stable
from .invariant import SetKind, contains, converges_to_E1, make_invariant_set, verify_step_stays
from .model import ModelParams, PlanktonState, positive_fixed_point
from .neimark_sacker import lyapunov_quantity
from .orbit import (
    SweepConfig,
    bifurcation_diagram,
    mle_curve,
    simulate,
    stability_region,
    write_csv,
)
from .stability import (
    FixedPointReport,
    NoCriticalParameter,
    classify_E0,
    classify_E1,
    classify_positive,
)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return n


def _common(p: argparse.ArgumentParser, gamma: bool = True) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--r", type=float, help="zooplankton death rate (> 0)")
    g.add_argument("--c", type=float, help="saturation constant (> 0)")
    if gamma:
        g.add_argument("--gamma", type=float, help="net gain beta - theta")
    g.add_argument("--h", type=int, choices=(1, 2), help="response order: 1 (Holling II) or 2 (Holling III)")
    o = p.add_argument_group("run")
    o.add_argument("--seed", type=int, default=0, help="seed for randomised choices (default 0)")
    o.add_argument("--out", default="-", help="output file, '-' for stdout (default)")
    o.add_argument("--threads", type=int, default=None, help="sweep worker threads (default: all cores)")
    o.add_argument("--config", help="key = value file mirroring these flags")


def _sweep_flags(p: argparse.ArgumentParser, samples: bool) -> None:
    s = p.add_argument_group("sweep")
    s.add_argument("--u0", type=float, default=0.35)
    s.add_argument("--v0", type=float, default=0.6)
    s.add_argument("--gamma-min", type=float, default=0.5)
    s.add_argument("--gamma-max", type=float, default=3.0)
    s.add_argument("--steps", type=int, default=1000, help="gamma grid points")
    s.add_argument("--transient", type=_positive_int, default=2000)
    if samples:
        s.add_argument("--samples", type=int, default=200, help="recorded iterates per gamma")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planktonmap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("fixed-points", help="classify E0, E1 and the positive fixed point (JSON)")
    _common(p)
    p.add_argument("--tol", type=float, default=1e-9, help="non-hyperbolic tolerance")

    p = sub.add_parser("ns", help="Neimark-Sacker coefficients at the critical gamma (JSON)")
    _common(p, gamma=False)
    p.add_argument("--gamma0", type=float, default=None, help="override the computed critical gamma")

    p = sub.add_parser("simulate", help="orbit from (u0, v0) (CSV: n,u,v)")
    _common(p)
    p.add_argument("--u0", type=float, default=0.35)
    p.add_argument("--v0", type=float, default=0.6)
    p.add_argument("--n", type=_positive_int, default=10_000, help="iterations")

    p = sub.add_parser("bifdiag", help="bifurcation diagram over gamma (CSV: gamma,sample_index,u,v)")
    _common(p, gamma=False)
    _sweep_flags(p, samples=True)

    p = sub.add_parser("mle", help="maximum Lyapunov exponent over gamma (CSV: gamma,mle)")
    _common(p, gamma=False)
    _sweep_flags(p, samples=False)
    p.add_argument("--n", type=int, default=20_000, help="iterations averaged per gamma")

    p = sub.add_parser("region", help="attracting band r(1+c) < gamma < gamma0 (CSV: r,c,gamma_low,gamma_high)")
    _common(p, gamma=False)
    for name, lo, hi in (("r", 0.05, 1.0), ("c", 0.05, 2.0)):
        p.add_argument(f"--{name}-min", type=float, default=lo)
        p.add_argument(f"--{name}-max", type=float, default=hi)
        p.add_argument(f"--{name}-steps", type=int, default=20)

    p = sub.add_parser("control", help="stabilising gain triangle (CSV) or a gain stability grid")
    _common(p)
    p.add_argument("--grid", type=int, default=None,
                   help="emit an N x N (s1,s2,stable) grid over the padded triangle instead")

    p = sub.add_parser("invariant", help="invariant-set membership grid and convergence verdicts (CSV)")
    _common(p)
    p.add_argument("--set", dest="set_kind", choices=[k.value for k in SetKind], required=False)
    p.add_argument("--grid", type=int, default=21, help="grid points per axis")
    p.add_argument("--converge", action="store_true", help="also iterate each start toward E1")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


# ---------------------------------------------------------------- config files

def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def _apply_config(parser, argv, args):
    sub = _subparser(parser, args.command)
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    values = read_config(args.config)
    named = values.pop("command", args.command)
    if named != args.command:
        raise ValidationError(f"config is for '{named}', not '{args.command}'")
    defaults = {}
    for key, text in values.items():
        if key == "set":
            key = "set_kind"
        if key not in actions:
            raise ValidationError(f"unknown config key '{key}' for '{args.command}'")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = text.lower() in ("1", "true", "yes", "on")
            continue
        try:
            val = action.type(text) if action.type else text
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise ValidationError(f"bad value for '{key}': {text!r} ({exc})") from None
        if action.choices is not None and val not in action.choices:
            raise ValidationError(f"bad value for '{key}': {text!r}")
        defaults[key] = val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- helpers

def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValidationError(f"missing required value(s): {flags}")


def _params(args, gamma: float | None = None) -> ModelParams:
    _need(args, "r", "c", "h")
    if gamma is None:
        _need(args, "gamma")
        gamma = args.gamma
    try:
        return ModelParams(args.r, args.c, gamma, args.h)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _sweep(args, samples: int) -> SweepConfig:
    try:
        return SweepConfig((args.gamma_min, args.gamma_max, args.steps), args.transient, samples,
                           (args.u0, args.v0), args.seed)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _threads(args):
    if args.threads is not None and args.threads < 1:
        raise ValidationError("--threads must be >= 1")
    return args.threads


@contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


def _report_json(rep: FixedPointReport) -> dict:
    out = {
        "u": rep.point.u,
        "v": rep.point.v,
        "classification": rep.classification.value,
        "eigenvalues": [_cplx(z) for z in rep.eigenvalues],
        "moduli": [abs(z) for z in rep.eigenvalues],
    }
    if rep.p_value is not None:
        out["p"] = rep.p_value
        out["q"] = rep.q_value
    return out


def _dump_json(obj, path):
    with _output(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------- commands

def cmd_fixed_points(args) -> None:
    params = _params(args)
    out = {
        "params": {"r": params.r, "c": params.c, "gamma": params.gamma, "h": params.h},
        "E0": _report_json(classify_E0(params, args.tol)),
        "E1": _report_json(classify_E1(params, args.tol)),
    }
    pos = classify_positive(params, args.tol)
    if pos is not None:
        out["positive"] = _report_json(pos)
    _dump_json(out, args.out)


def cmd_ns(args) -> None:
    _need(args, "r", "c", "h")
    params = _params(args, gamma=1.0)
    try:
        rep = lyapunov_quantity(params, gamma0=args.gamma0)
        fd = lyapunov_quantity(params, gamma0=rep.gamma0, fd=True)
    except NoCriticalParameter as exc:
        raise ValidationError(str(exc)) from None
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    out = {"params": {"r": params.r, "c": params.c, "h": params.h}}
    out.update(rep.to_json())
    out["L_fd"] = fd.L
    _dump_json(out, args.out)


def cmd_simulate(args) -> None:
    params = _params(args)
    orbit = simulate(params, PlanktonState(args.u0, args.v0), args.n)
    if orbit.diverged:
        print(f"warning: orbit diverged after {orbit.length - 1} iterations", file=sys.stderr)
    with _output(args.out) as fh:
        write_csv(fh, ("n", "u", "v"), ((k, s[0], s[1]) for k, s in enumerate(orbit.states)))


def cmd_bifdiag(args) -> None:
    params = _params(args, gamma=1.0)
    table = bifurcation_diagram(params, _sweep(args, args.samples), threads=_threads(args))
    with _output(args.out) as fh:
        table.to_csv(fh)


def cmd_mle(args) -> None:
    params = _params(args, gamma=1.0)
    sweep = _sweep(args, 1)
    if args.n < 1:
        raise ValidationError("--n must be >= 1")
    curve = mle_curve(params, sweep, n=args.n, threads=_threads(args))
    with _output(args.out) as fh:
        curve.to_csv(fh)


def cmd_region(args) -> None:
    _need(args, "h")
    for name in ("r", "c"):
        lo, hi, n = (getattr(args, f"{name}_{k}") for k in ("min", "max", "steps"))
        if not (0 < lo < hi) or n < 2:
            raise ValidationError(f"--{name}-min/--{name}-max/--{name}-steps must give a positive range with >= 2 points")
    table = stability_region((args.r_min, args.r_max, args.r_steps), (args.c_min, args.c_max, args.c_steps), args.h)
    with _output(args.out) as fh:
        table.to_csv(fh)


def cmd_control(args) -> None:
    params = _params(args)
    fp = positive_fixed_point(params)
    if fp is None:
        raise ValidationError("no positive fixed point: need gamma > r(1+c)")
    tri = control_triangle(params, fp)
    with _output(args.out) as fh:
        if args.grid is None:
            rows = [("vertex", f"{a}&{b}", s1, s2, "", "", "")
                    for (a, b), (s1, s2) in zip((("l1", "l2"), ("l2", "l3"), ("l1", "l3")), tri.vertices)]
            rows += [("line", ln.name, "", "", ln.A, ln.B, ln.C) for ln in tri.lines]
            write_csv(fh, ("kind", "name", "s1", "s2", "A", "B", "C"), rows)
            return
        if args.grid < 2:
            raise ValidationError("--grid must be >= 2")
        xs = np.array([p[0] for p in tri.vertices])
        ys = np.array([p[1] for p in tri.vertices])
        padx, pady = 0.25 * np.ptp(xs), 0.25 * np.ptp(ys)
        g1 = np.linspace(xs.min() - padx, xs.max() + padx, args.grid)
        g2 = np.linspace(ys.min() - pady, ys.max() + pady, args.grid)
        rows = ((s1, s2, is_stable(params, fp, ControlGains(s1, s2)).stable) for s1 in g1 for s2 in g2)
        write_csv(fh, ("s1", "s2", "stable"), rows)


def cmd_invariant(args) -> None:
    params = _params(args)
    _need(args, "set_kind")
    if args.grid < 2:
        raise ValidationError("--grid must be >= 2")
    try:
        spec = make_invariant_set(args.set_kind, params)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if spec.kind in (SetKind.AXIS_U, SetKind.AXIS_V):
        along = np.linspace(0.0, 2.0, args.grid)
        pts = [(x, 0.0) if spec.kind is SetKind.AXIS_U else (0.0, x) for x in along]
    else:
        us = np.linspace(0.0, 1.0, args.grid)
        top = spec.upper_bound(us)
        vmax = float(np.max(np.where(np.isfinite(top), top, 0.0))) or 1.0
        vs = np.linspace(0.0, vmax, args.grid)
        pts = [(u, v) for u in us for v in vs]
    header = ["u", "v", "inside", "stays"]
    if args.converge:
        header += ["converged", "iterations"]
    rows = []
    for u, v in pts:
        inside = bool(contains(spec, (u, v)))
        row = [u, v, inside, bool(verify_step_stays(spec, (u, v))) if inside else False]
        if args.converge:
            ok, n = converges_to_E1(params, PlanktonState(u, v), args.max_iter, args.tol)
            row += [ok, n]
        rows.append(row)
    with _output(args.out) as fh:
        write_csv(fh, header, rows)


COMMANDS = {
    "fixed-points": cmd_fixed_points,
    "ns": cmd_ns,
    "simulate": cmd_simulate,
    "bifdiag": cmd_bifdiag,
    "mle": cmd_mle,
    "region": cmd_region,
    "control": cmd_control,
    "invariant": cmd_invariant,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, args)
        for name in ("r", "c", "gamma", "gamma0"):
            val = getattr(args, name, None)
            if val is not None and not math.isfinite(val):
                raise ValidationError(f"--{name} must be finite")
        COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"planktonmap: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"planktonmap: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"planktonmap: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
