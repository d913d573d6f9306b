"""Command-line entry points: ``fedmoo run`` and ``fedmoo sweep``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    ExperimentResult,
    config_from_sources,
    parse_config_file,
    run_experiment,
    sweep,
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    # Defaults are None sentinels so only flags the user typed override the
    # config file; real defaults live on ExperimentConfig.
    parser.add_argument("--config", type=Path, help="flat key=value configuration file")
    parser.add_argument("--problem", help="benchmark family, e.g. dtlz2")
    parser.add_argument("--objectives", type=int, help="number of objectives M")
    parser.add_argument("--dims", type=int, help="number of decision variables d")
    parser.add_argument("--optimizer", choices=("nsga2", "rvea"), help="MOEA to run on the acquisition")
    parser.add_argument("--clients", type=int, help="number of federation clients N")
    parser.add_argument("--participation", type=float, help="participation ratio in (0, 1]")
    parser.add_argument("--failure-prob", type=float, dest="failure_prob", help="per-client communication failure probability")
    parser.add_argument("--rounds", type=int, help="communication rounds R")
    parser.add_argument("--per-round", type=int, dest="per_round", help="candidates evaluated per round m")
    parser.add_argument("--runs", type=int, help="independent seeded runs")
    parser.add_argument("--seed", type=int, help="base seed; run i uses seed + i")
    parser.add_argument("--epochs", type=int, help="local SGD epochs per refit")
    parser.add_argument("--learning-rate", type=float, dest="learning_rate", help="SGD learning rate")
    parser.add_argument("--batch-size", type=int, dest="batch_size", help="SGD mini-batch size")
    parser.add_argument("--alpha", type=float, help="LCB uncertainty weight")
    parser.add_argument("--kernel", choices=("squared", "printed"), help="RBF kernel exponent form")
    parser.add_argument("--centers", type=int, help="RBFN center count override")
    parser.add_argument("--data-cap", type=int, dest="data_cap", help="client dataset cap override")
    parser.add_argument("--init-samples", type=int, dest="init_samples", help="initial design size override")
    parser.add_argument("--pop-size", type=int, dest="pop_size", help="NSGA-II population size")
    parser.add_argument("--generations", type=int, help="MOEA generations per round")
    parser.add_argument("--max-restarts", type=int, dest="max_restarts", help="extra MOEA runs when candidates collapse")
    parser.add_argument("--reference-size", type=int, dest="reference_size", help="IGD reference set size")
    parser.add_argument("--workers", type=int, help="parallel run workers")
    parser.add_argument(
        "--no-timing",
        action="store_const",
        const=False,
        dest="record_timing",
        help="record 0 in the ms column for byte-stable output",
    )
    parser.add_argument("--out", help="output directory for CSV/JSON results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedmoo",
        description="Federated surrogate-assisted evolutionary optimization experiments",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    run_cmd = commands.add_parser("run", help="run one experiment")
    _add_config_flags(run_cmd)
    sweep_cmd = commands.add_parser("sweep", help="run one experiment per parameter value")
    _add_config_flags(sweep_cmd)
    sweep_cmd.add_argument(
        "--parameter",
        required=True,
        choices=("participation", "failure_prob"),
        help="which field to sweep",
    )
    sweep_cmd.add_argument(
        "--values",
        required=True,
        help="comma-separated values, e.g. 0.5,0.6,0.7,0.8",
    )
    return parser


def _config_from_args(args: argparse.Namespace):
    file_values = parse_config_file(args.config) if args.config else None
    skip = {"command", "config", "parameter", "values"}
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in skip and value is not None
    }
    return config_from_sources(file_values, overrides)


def _print_summary(result: ExperimentResult) -> None:
    s = result.summary
    print(
        f"{s['problem']} M={s['M']} d={s['d']} {s['optimizer']}: "
        f"mean final IGD {s['mean_igd']:.4f} (std {s['std_igd']:.1e}) "
        f"over {len(s['runs'])} runs"
    )
    if result.paths:
        print(f"wrote {result.paths['records']}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "run":
            _print_summary(run_experiment(config))
        else:
            values = [float(v) for v in args.values.split(",") if v.strip()]
            for result in sweep(config, args.parameter, values):
                _print_summary(result)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
