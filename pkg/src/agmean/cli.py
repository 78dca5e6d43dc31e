"""Command-line front end.

verify runs a verification suite; search runs a falsification campaign.
Exit codes: 0 all records pass, 1 an invariant failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import sys

from .errors import AgmeanError, ConfigError
from .harness import SUITES, ExperimentConfig, Tolerances, run_suite


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p]


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p]


def _add_common(parser):
    parser.add_argument("--dims", type=_int_list, default=[2, 3, 4], metavar="D1,D2,...")
    parser.add_argument("--r", type=_float_list, default=[], dest="r_values", metavar="R1,R2,...")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ensemble", default="wishart")
    parser.add_argument("--condition-cap", type=float, default=100.0)
    parser.add_argument("--eps", type=float, default=0.1, help="near_identity radius")
    parser.add_argument("--candidate", default="r_mean")
    parser.add_argument("--tol-pd", type=float, default=1e-12)
    parser.add_argument("--tol-order", type=float, default=1e-10)
    parser.add_argument("--tol-qo", type=float, default=1e-8)
    parser.add_argument("--out", default="report.jsonl")
    parser.add_argument("--csv", default=None, help="also write a CSV report here")
    parser.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agmean")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", required=True, choices=SUITES)
    _add_common(verify)

    search = sub.add_parser("search", help="run a counterexample search")
    target = search.add_subparsers(dest="target", required=True)
    ag = target.add_parser("ag", help="hunt for an affine-bound violation")
    _add_common(ag)
    trans = target.add_parser("transitivity", help="hunt for a transitivity failure")
    _add_common(trans)
    trans.add_argument("--margin", type=float, default=1e-4)
    return parser


def _config_from(args, suite: str) -> ExperimentConfig:
    return ExperimentConfig(
        suite=suite,
        dims=args.dims,
        r_values=args.r_values,
        trials=args.trials,
        seed=args.seed,
        tolerances=Tolerances(args.tol_pd, args.tol_order, args.tol_qo),
        ensemble=args.ensemble,
        condition_cap=args.condition_cap,
        eps=args.eps,
        candidate=args.candidate,
        margin=getattr(args, "margin", 1e-4),
        out_path=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        suite = args.suite
    else:
        suite = "search_ag" if args.target == "ag" else "search_transitivity"
    try:
        cfg = _config_from(args, suite)
        summary = run_suite(cfg, workers=args.workers)
        if args.csv:
            # re-emit from the JSONL so the CSV matches the written report exactly
            from .harness import emit_report, load_records

            emit_report(load_records(cfg.out_path), csv_path=args.csv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AgmeanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(summary.format())
    return 1 if summary.failed else 0


if __name__ == "__main__":
    sys.exit(main())
