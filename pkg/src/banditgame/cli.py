"""Command-line interface.

Subcommands: solve (equilibrium of an instance), analyze (gap constants),
run (one self-play trial), regret-exp and psne-exp (the two experiments).
Instances come from a generator (--gen with its parameters) or a matrix
file (--matrix, plain text: "m n" header then rows).  Experiment configs
come from a JSON file (--config) or a named preset (--preset); flags
override file values.  Exit codes: 0 success, 1 runtime failure,
2 usage/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, dynamics, experiments
from .equilibrium import (gen_example_2x2, gen_hard_psne_instance,
                          gen_lower_bound_instance, instance_constants,
                          solve_ne)
from .errors import BanditGameError, ValidationError
from .game import load_matrix_text
from .learners import make_learner

GENERATORS = ("example2x2", "hardpsne", "lowerbound")


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance (exactly one source)")
    g.add_argument("--gen", choices=GENERATORS, help="instance generator")
    g.add_argument("--matrix", help="matrix file path ('m n' header + rows)")
    g.add_argument("--eps", type=float, help="example2x2: epsilon in (0, 1/3)")
    g.add_argument("--m", type=int, default=3, help="hardpsne: rows")
    g.add_argument("--n", type=int, default=3, help="hardpsne: columns")
    g.add_argument("--d-min", type=float, help="hardpsne: smallest gap / 2")
    g.add_argument("--d1", type=float, help="hardpsne: bulk gap / 2")
    g.add_argument("--delta", help="lowerbound: comma-separated row gaps")
    g.add_argument("--delta-prime", help="lowerbound: comma-separated column gaps")


def _parse_vector(text: str, flag: str) -> list:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"{flag} must be a comma-separated list of numbers")


def _instance(args) -> np.ndarray:
    if (args.matrix is None) == (args.gen is None):
        raise ValidationError("specify exactly one of --matrix or --gen")
    if args.matrix:
        return load_matrix_text(args.matrix)
    if args.gen == "example2x2":
        if args.eps is None:
            raise ValidationError("--gen example2x2 requires --eps")
        return gen_example_2x2(args.eps)
    if args.gen == "hardpsne":
        if args.d_min is None or args.d1 is None:
            raise ValidationError("--gen hardpsne requires --d-min and --d1")
        return gen_hard_psne_instance(args.m, args.n, args.d_min, args.d1)
    if args.delta is None or args.delta_prime is None:
        raise ValidationError("--gen lowerbound requires --delta and --delta-prime")
    return gen_lower_bound_instance(_parse_vector(args.delta, "--delta"),
                                    _parse_vector(args.delta_prime, "--delta-prime"))


def _fmt_vec(v) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in v) + ")"


def _maybe_write_json(payload: dict, path) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_solve(args) -> int:
    A = _instance(args)
    sol = solve_ne(A)
    print(f"x_star = {_fmt_vec(sol.x_star)}")
    print(f"y_star = {_fmt_vec(sol.y_star)}")
    print(f"value  = {sol.value:.9g}")
    print(f"support_I = {list(sol.support_I)}  support_J = {list(sol.support_J)}"
          f"  pure = {sol.is_pure}")
    _maybe_write_json(sol.to_dict(), args.json)
    return 0


def cmd_analyze(args) -> int:
    A = _instance(args)
    sol = solve_ne(A)
    consts = instance_constants(A, sol)
    print(f"value = {sol.value:.9g}  pure = {sol.is_pure}"
          f"{'  DEGENERATE (reciprocal gaps undefined)' if consts.degenerate else ''}")
    print(f"delta       = {_fmt_vec(consts.delta)}")
    print(f"delta_prime = {_fmt_vec(consts.delta_prime)}")
    print(f"omega = {consts.omega:.6g}  omega_prime = {consts.omega_prime:.6g}")
    print(f"gamma = {consts.gamma:.6g}  gamma_prime = {consts.gamma_prime:.6g}")
    print(f"delta_min = {consts.delta_min:.6g}  OPT = {consts.opt:.6g}")
    _maybe_write_json({**sol.to_dict(), **consts.to_dict()}, args.json)
    return 0


def cmd_run(args) -> int:
    A = _instance(args)
    if args.T < 1:
        raise ValidationError(f"-T must be >= 1, got {args.T}")
    col_algo = args.col_algo or args.algo
    row = make_learner(args.algo, A.shape[0])
    col = make_learner(col_algo, A.shape[1])
    record = dynamics.run_selfplay(
        A, row, col, args.T, args.seed,
        two_samples=args.two_samples,
        store_trajectory=args.debug_trajectory)
    summary = dynamics.pseudo_regret(record, A)
    i_hat, j_hat = dynamics.identify_psne(record)
    print(f"T = {args.T}  seed = {args.seed}  row = {args.algo}  col = {col_algo}")
    print(f"reg_row = {summary.reg_row:.9g}  reg_col = {summary.reg_col:.9g}"
          f"  dgap_avg = {summary.dgap_avg:.9g}")
    print(f"avg_x = {_fmt_vec(record.avg_x)}")
    print(f"avg_y = {_fmt_vec(record.avg_y)}")
    print(f"most played pair = ({i_hat}, {j_hat})")
    if args.out:
        _maybe_write_json(record.to_dict(), args.out)
        print(f"wrote {args.out}")
    return 0


def _load_experiment_config(args, expected_kind: str):
    if (args.preset is None) == (args.config is None):
        raise ValidationError("specify exactly one of --preset or --config")
    if args.preset:
        try:
            cfg = experiments.PRESETS[args.preset]
        except KeyError:
            raise ValidationError(
                f"unknown preset {args.preset!r}; available: "
                + ", ".join(sorted(experiments.PRESETS)))
        d = cfg.to_dict()
    else:
        with open(args.config) as fh:
            d = json.load(fh)
        d.setdefault("kind", expected_kind)
    if args.seed is not None:
        d["master_seed"] = args.seed
    if args.trials is not None:
        d["trials"] = args.trials
    if d.get("kind") != expected_kind:
        raise ValidationError(
            f"config kind {d.get('kind')!r} does not match this subcommand")
    if expected_kind == "regret_scaling":
        return experiments.RegretScalingConfig.from_dict(d)
    return experiments.PsneIdConfig.from_dict(d)


def _run_experiment(args, kind: str) -> int:
    cfg = _load_experiment_config(args, kind)
    runner = (experiments.run_regret_scaling if kind == "regret_scaling"
              else experiments.run_psne_identification)
    result = runner(cfg, threads=args.threads)
    for fit in result.fits:
        print("fit: " + json.dumps(fit, sort_keys=True))
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    paths = experiments.write_results(result, args.out, formats)
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditgame",
        description="Self-play bandit learning in zero-sum matrix games")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a Nash equilibrium")
    _add_instance_args(p)
    p.add_argument("--json", help="also write the solution as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="equilibrium + gap constants")
    _add_instance_args(p)
    p.add_argument("--json", help="also write the analysis as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="one self-play trial")
    _add_instance_args(p)
    p.add_argument("--algo", default="tsallis",
                   choices=["tsallis", "exp3", "ucb1", "uniform"])
    p.add_argument("--col-algo", choices=["tsallis", "exp3", "ucb1", "uniform"],
                   help="column learner (defaults to --algo)")
    p.add_argument("-T", type=int, required=True, help="horizon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--two-samples", action="store_true",
                   help="independent outcome samples for the two players")
    p.add_argument("--debug-trajectory", action="store_true",
                   help="store full per-round strategies (T <= 10^4)")
    p.add_argument("--out", help="write the trial record as JSON")
    p.set_defaults(func=cmd_run)

    for name, kind in (("regret-exp", "regret_scaling"),
                       ("psne-exp", "psne_identification")):
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--preset", help="named preset config")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="override master seed")
        p.add_argument("--trials", type=int, help="override trial count")
        p.add_argument("--threads", type=int,
                       help="worker threads (also env BANDITGAME_THREADS)")
        p.add_argument("--out", required=True, help="output path prefix")
        p.add_argument("--formats", default="csv,json",
                       help="comma list of csv,json,svg")
        p.set_defaults(func=lambda a, k=kind: _run_experiment(a, k))

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BanditGameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
