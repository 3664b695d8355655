"""Command-line interface.

Subcommands:
  train-hm    hard-margin training on a LIBSVM file
  train-nu    nu-SVM training (requires --nu or --alpha)
  gilbert     Gilbert-algorithm baseline distance
  oracle      high-precision Frank-Wolfe distance oracle
  dist-sim    simulated distributed training with a communication meter
  sweep-beta  equal-budget sweep over beta values, best run reported

Exit codes: 0 success, 2 configuration/data errors, 3 numerical faults.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import saddle_core as core
from .data_model import load_libsvm
from .distributed import run_simulation
from .errors import ConfigError, DataError, NumericalError
from .geometry_oracle import fw_oracle, gilbert_solve
from .preprocess import apply_transform

DEFAULT_BETAS = (1e-1, 1e-2, 1e-3, 1e-4)
TRACE_COLUMNS = ("iter", "primal", "dual", "gap", "elapsed_ms",
                 "scalars_up", "scalars_down")


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="LIBSVM training file")
    p.add_argument("--output", help="write the JSON summary here instead of stdout")
    p.add_argument("--force-dim", type=int, default=None,
                   help="treat the data as having at least this many features")
    p.add_argument("--label-map-other", action="store_true",
                   help="map labels 0/2 to -1 instead of rejecting them")


def _add_train_args(p: argparse.ArgumentParser) -> None:
    _add_io_args(p)
    p.add_argument("--test", help="LIBSVM file to score after training")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--beta", type=float, default=1e-1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-blocks", type=int, default=200)
    p.add_argument("--trace", help="write the per-checkpoint trace to this file")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="trace file format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddlesvm",
        description="Linear SVM training via an entropy-regularized saddle-point solver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-hm", help="hard-margin training")
    _add_train_args(p)

    p = sub.add_parser("train-nu", help="nu-SVM training")
    _add_train_args(p)
    p.add_argument("--nu", type=float, help="cap on individual dual weights")
    p.add_argument("--alpha", type=float,
                   help="set nu = 1/(alpha * min(n1, n2))")

    p = sub.add_parser("gilbert", help="Gilbert-algorithm hull distance")
    _add_io_args(p)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("oracle", help="high-precision distance oracle")
    _add_io_args(p)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("dist-sim", help="simulated distributed training")
    _add_train_args(p)
    p.add_argument("--k", type=int, required=True, help="number of clients")
    p.add_argument("--scheme", choices=("round-robin", "contiguous", "random"),
                   default="round-robin")
    p.add_argument("--nu", type=float)
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("sweep-beta", help="equal-budget beta sweep")
    _add_train_args(p)
    p.add_argument("--betas", type=float, nargs="+", default=list(DEFAULT_BETAS))
    return parser


def _load(args):
    with open(args.input) as fh:
        text = fh.read()
    from .data_model import parse_libsvm
    return parse_libsvm(text, map_other_labels=args.label_map_other,
                        min_dim=args.force_dim)


def _solve_config(args, mode: core.Mode) -> core.SolveConfig:
    return core.SolveConfig(
        epsilon=args.epsilon, beta=args.beta,
        nu=getattr(args, "nu", None), alpha=getattr(args, "alpha", None),
        mode=mode, seed=args.seed, max_blocks=args.max_blocks,
    )


def _summary(sol: core.Solution) -> dict:
    return {
        "objective": sol.distance_input,
        "objective_half_sq": sol.primal,
        "margin": sol.margin,
        "b": sol.b,
        "iterations": sol.iterations,
        "wall_time_s": sol.wall_time,
        "status": sol.status,
        "gap": sol.gap,
        "dual_value": sol.dual_value,
    }


def _score(sol: core.Solution, path: str, label_map: bool) -> float:
    test = load_libsvm(path) if not label_map else None
    if test is None:
        with open(path) as fh:
            from .data_model import parse_libsvm
            test = parse_libsvm(fh.read(), map_other_labels=True)
    pred = core.predict(sol.spec, sol.w, sol.b, test.X)
    return float(np.mean(pred == test.labels))


def _emit(record: dict, args) -> None:
    text = json.dumps(record, indent=2, default=float)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_trace(trace: list, args) -> None:
    if not getattr(args, "trace", None):
        return
    rows = [{col: row[col] for col in TRACE_COLUMNS} for row in trace]
    if args.format == "json":
        payload = json.dumps(rows, indent=2, default=float) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
        payload = buf.getvalue()
    with open(args.trace, "w") as fh:
        fh.write(payload)


def _cmd_train(args, mode: core.Mode) -> dict:
    data = _load(args)
    if mode == core.Mode.NU and args.nu is None and args.alpha is None:
        raise ConfigError("train-nu requires --nu or --alpha")
    sol = core.solve(data, _solve_config(args, mode))
    record = _summary(sol)
    if args.test:
        record["test_accuracy"] = _score(sol, args.test, args.label_map_other)
    _write_trace(sol.trace, args)
    return record


def _cmd_gilbert(args) -> dict:
    data = _load(args)
    tdata = apply_transform(data, args.seed)
    res = gilbert_solve(tdata, args.epsilon)
    return {
        "distance": res.distance / tdata.spec.scale,
        "distance_transformed": res.distance,
        "half_sq": res.half_sq,
        "iterations": res.iterations,
        "status": res.status,
    }


def _cmd_oracle(args) -> dict:
    data = _load(args)
    tdata = apply_transform(data, args.seed)
    res = fw_oracle(tdata, args.nu, args.tolerance)
    return {
        "distance": res.distance / tdata.spec.scale,
        "distance_transformed": res.distance,
        "half_sq": res.half_sq,
        "gap_certificate": res.gap_certificate,
        "iterations": res.iterations,
        "status": res.status,
    }


def _cmd_dist_sim(args) -> dict:
    data = _load(args)
    mode = core.Mode.NU if (args.nu is not None or args.alpha is not None) \
        else core.Mode.HARD_MARGIN
    sol, stats = run_simulation(data, _solve_config(args, mode), args.k,
                                scheme=args.scheme)
    record = _summary(sol)
    record["comm"] = {
        "k": stats.k,
        "iterations": stats.iterations,
        "scalars_up": stats.scalars_up,
        "scalars_down": stats.scalars_down,
        "checkpoint_up": stats.checkpoint_up,
        "checkpoint_down": stats.checkpoint_down,
        "total_scalars": stats.total_scalars,
    }
    if args.test:
        record["test_accuracy"] = _score(sol, args.test, args.label_map_other)
    _write_trace(sol.trace, args)
    return record


def _cmd_sweep_beta(args) -> dict:
    """Run every beta with the same iteration budget and keep the best.

    The shared per-block budget is the largest default block size over the
    swept betas, so smaller betas are not given extra iterations.
    """
    from .preprocess import next_pow2

    data = _load(args)
    best = None
    rows = []
    d_pad = next_pow2(data.d)
    block = max(
        core.default_block_size(
            core.derive_params(args.epsilon, beta, None, data.n, data.n1,
                               data.n2, d_pad, core.Mode.HARD_MARGIN))
        for beta in args.betas
    )
    for beta in args.betas:
        cfg = core.SolveConfig(epsilon=args.epsilon, beta=beta, seed=args.seed,
                               max_blocks=args.max_blocks, block_size=block)
        sol = core.solve(data, cfg)
        rows.append({"beta": beta, "objective": sol.distance_input,
                     "primal": sol.primal, "iterations": sol.iterations,
                     "status": sol.status})
        if best is None or sol.primal < best[1].primal:
            best = (beta, sol)
    record = _summary(best[1])
    record["beta"] = best[0]
    record["sweep"] = rows
    _write_trace(best[1].trace, args)
    return record


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train-hm":
            record = _cmd_train(args, core.Mode.HARD_MARGIN)
        elif args.command == "train-nu":
            record = _cmd_train(args, core.Mode.NU)
        elif args.command == "gilbert":
            record = _cmd_gilbert(args)
        elif args.command == "oracle":
            record = _cmd_oracle(args)
        elif args.command == "dist-sim":
            record = _cmd_dist_sim(args)
        else:
            record = _cmd_sweep_beta(args)
    except (ConfigError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return 3
    _emit(record, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
