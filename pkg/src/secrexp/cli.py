"""Command-line interface. All information quantities are in nats unless --bits is given."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import capacity as cap_mod
from .channel import degradedness_check, load_channel
from .code import (
    correct_probability,
    error_probability,
    induced_joint,
    leakage_rate,
    load_code,
    receiver_mutual_information,
)
from .errors import SecrexpError
from .harness import ConverseExperimentConfig, converse_sweep, exponent_table, sweep_csv
from .spectrum import BoundParams, default_theta_grid, lemma3_bound, verdu_han_bound

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x) -> float:
    """Round to 12 significant digits (JSON and text output)."""
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(format(x, ".12g"))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".12g")
    return json.dumps(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _g(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, result: dict, out=None):
    out = out or sys.stdout
    if args.json:
        out.write(dumps_json(result))
        return
    clean = _clean(result)
    for key in sorted(clean):
        out.write(f"{key} {_fmt(clean[key])}\n")


def _info(args, x: float) -> float:
    return x / math.log(2) if args.bits else x


def _write(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args):
    ch = load_channel(args.channel)
    return {"x_size": ch.x_size, "y_size": ch.y_size, "z_size": ch.z_size, "row_sum_residual": ch.input_residual}


def cmd_degraded(args):
    rep = degradedness_check(load_channel(args.channel))
    return {
        "degraded": rep.degraded,
        "residual": rep.residual,
        "witness": None if rep.witness is None else rep.witness.p.tolist(),
    }


def _solver_config(args) -> cap_mod.SolverConfig:
    return cap_mod.SolverConfig(restarts=args.restarts, max_iters=args.max_iters, tol=args.tol, seed=args.seed,
                                grid_resolution=args.grid_resolution)


def cmd_capacity(args):
    ch = load_channel(args.channel)
    cfg = _solver_config(args)
    if args.oracle_grid:
        res = cap_mod.grid_oracle(ch, cfg.grid_resolution)
    else:
        res = cap_mod.secrecy_capacity(ch, cfg)
    return {
        "secrecy_capacity": _info(args, res.value),
        "method": res.method,
        "converged": res.converged,
        "restarts_used": res.restarts_used,
        "p_u": res.argmax.p_u.tolist(),
        "p_x_given_u": res.argmax.p_x_given_u.tolist(),
    }


def _load_pair(args):
    ch = load_channel(args.channel)
    code = load_code(args.code, ch)
    return ch, code, induced_joint(ch, code, workers=1 if args.serial else None)


def cmd_analyze(args):
    ch, code, ij = _load_pair(args)
    return {
        "n": code.n,
        "m_count": code.m_count,
        "rate": _info(args, code.rate),
        "p_correct": correct_probability(ij),
        "p_error": error_probability(ij),
        "leakage": _info(args, leakage_rate(ij)),
        "i_m_y": _info(args, receiver_mutual_information(ij, "bob")),
        "i_m_z": _info(args, receiver_mutual_information(ij, "eve")),
    }


def _grid(args):
    if args.grid:
        return np.array([float(t) for t in args.grid.split(",")])
    return default_theta_grid(args.theta_min, args.theta_max, args.theta_points)


def cmd_exponent(args):
    ch = load_channel(args.channel)
    code = load_code(args.code, ch)
    prof = exponent_table(ch, code, _grid(args), Delta=args.Delta, target=args.target, rate=args.rate, eta=args.eta)
    for t, flag in zip(prof.theta_grid, prof.convexity_flags):
        if flag:
            print(f"warning: convexity check failed at theta={t:.12g}", file=sys.stderr)
    _write(args, prof.to_csv())
    return None


def cmd_bound(args):
    ch, code, ij = _load_pair(args)
    rate = code.rate if args.rate is None else args.rate
    params = BoundParams(R=rate, eta=args.eta, theta=args.theta, n=code.n)
    l3 = lemma3_bound(ij, params)
    vh = verdu_han_bound(ij, rate, args.eta)
    return {
        "rate": _info(args, rate),
        "eta": args.eta,
        "theta": args.theta,
        "p_correct": correct_probability(ij),
        "verdu_han_bound": vh,
        "lemma3_bound": l3,
    }


def cmd_sweep(args):
    cfg = ConverseExperimentConfig.from_file(args.config)
    if args.serial:
        cfg.workers = 1
    elif "SECREXP_THREADS" in os.environ:
        cfg.workers = max(1, int(os.environ["SECREXP_THREADS"]))
    _write(args, sweep_csv(converse_sweep(cfg)))
    return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--bits", action="store_true", help="display information quantities in bits")
    common.add_argument("--serial", action="store_true", help="force deterministic serial evaluation")
    common.add_argument("-o", "--output", help="write CSV output to this file")

    p = _Parser(prog="secrexp", description=__doc__ + " Worker threads are capped by SECREXP_THREADS.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a channel file")
    s.add_argument("channel")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("degraded", parents=[common], help="test stochastic degradedness")
    s.add_argument("channel")
    s.set_defaults(func=cmd_degraded)

    s = sub.add_parser("capacity", parents=[common], help="estimate the secrecy capacity")
    s.add_argument("channel")
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--max-iters", type=int, default=5000)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid-resolution", type=int, default=200)
    s.add_argument("--oracle-grid", action="store_true", help="exhaustive lattice search instead of the solver")
    s.set_defaults(func=cmd_capacity)

    for name, func, text in (("analyze", cmd_analyze, "exact code metrics"),
                             ("exponent", cmd_exponent, "exponent-function profile as CSV"),
                             ("bound", cmd_bound, "Verdu-Han and Chernoff-tilted bounds")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("channel")
        s.add_argument("code")
        s.set_defaults(func=func)
        if name == "exponent":
            s.add_argument("--Delta", type=float, default=0.2)
            s.add_argument("--target", type=float, default=None, help="default: I(M;Y^n)/n")
            s.add_argument("--rate", type=float, default=None, help="default: the code rate")
            s.add_argument("--eta", type=float, default=None, help="default: Delta/8")
            s.add_argument("--grid", help="comma-separated theta values")
            s.add_argument("--theta-min", type=float, default=1e-4)
            s.add_argument("--theta-max", type=float, default=8.0)
            s.add_argument("--theta-points", type=int, default=61)
        if name == "bound":
            s.add_argument("--rate", type=float, default=None, help="default: the code rate")
            s.add_argument("--eta", type=float, required=True)
            s.add_argument("--theta", type=float, required=True)

    s = sub.add_parser("sweep", parents=[common], help="converse sweep from a JSON config")
    s.add_argument("config")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except SecrexpError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if result is not None:
        _emit(args, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
