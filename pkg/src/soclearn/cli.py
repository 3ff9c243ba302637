"""Command-line front end.

Four subcommands: ``run`` executes a configuration and exports CSVs,
``compare`` runs the switching protocol against its always-communicate
baseline, ``analyze`` prints the identifiability structure, and
``validate`` checks the standing assumptions (exit status 2 on
failure, for scripting).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .analysis import identifiability_report
from .harness import (
    ExperimentConfig,
    build_model,
    compare_baseline,
    export,
    run_experiment,
)
from .model import AssumptionViolation, validate_assumptions


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_json(args.config)
    overrides = {}
    for name in ("seed", "replicas"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _cmd_run(args) -> int:
    config = _load_config(args)
    records = run_experiment(config)
    export(records, args.out, config)
    settled = [rec.consensus_round for rec in records]
    print(f"ran {len(records)} replica(s) of {config.rounds} rounds")
    print(f"consensus rounds: {settled}")
    print(f"wrote beliefs.csv, comm.csv, summary.txt to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    config = _load_config(args)
    comparison = compare_baseline(config, agent=args.agent)
    print(comparison.summary())
    if args.out:
        comparison.write(args.out)
        print(f"wrote comparison to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    config = _load_config(args)
    space, _, lik, _ = build_model(config)
    report = identifiability_report(lik, space)
    print(report.summary())
    if args.out:
        report.write_csv(args.out)
        print(f"wrote kl.csv, divergence.csv to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    config = _load_config(args)
    space, _, lik, net = build_model(config)
    report = validate_assumptions(lik, net, space)
    print(report.summary())
    return 0 if report.passed else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="soclearn",
        description="Networked social learning with informativeness-triggered "
        "communication.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and export CSVs")
    run_p.add_argument("--config", required=True, help="path to a JSON config")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--replicas", type=int, help="override the replica count")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser(
        "compare", help="run against the always-communicate baseline"
    )
    cmp_p.add_argument("--config", required=True, help="path to a JSON config")
    cmp_p.add_argument("--agent", type=int, default=None, help="designated agent")
    cmp_p.add_argument("--out", default=None, help="output directory (optional)")
    cmp_p.set_defaults(func=_cmd_compare)

    ana_p = sub.add_parser("analyze", help="print identifiability structure")
    ana_p.add_argument("--config", required=True, help="path to a JSON config")
    ana_p.add_argument("--out", default=None, help="CSV output directory (optional)")
    ana_p.set_defaults(func=_cmd_analyze)

    val_p = sub.add_parser("validate", help="check the standing assumptions")
    val_p.add_argument("--config", required=True, help="path to a JSON config")
    val_p.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AssumptionViolation as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
