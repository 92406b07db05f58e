"""Command line front end.

Subcommands
-----------
list-scenarios
    One line per shipped preset: id, metric, grid size, trial count, title.
run
    Monte Carlo run of one preset; writes ``<id>.csv`` plus a
    ``<id>.manifest.json`` provenance sidecar into the output directory.
analytic
    Closed-form outage rows for one preset; writes ``<id>-analytic.csv``.
verify
    The runtime invariant suite; prints one line per check.

Exit codes: 0 on success, 2 on configuration errors (unknown scenario,
invalid parameters, unusable paths), 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    default_workers,
    emit_analytic,
    emit_csv,
    list_scenarios,
    load_scenario,
    run_scenario,
)
from .verify import run_all

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cajsim",
        description="Cooperative anti-jamming simulations for sensor clusters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-scenarios", help="list the shipped scenario presets")

    run_p = sub.add_parser("run", help="Monte Carlo run of one preset")
    run_p.add_argument("--scenario", required=True, help="preset id, see list-scenarios")
    run_p.add_argument("--trials", type=int, default=None, help="override trials per cell")
    run_p.add_argument("--seed", type=int, default=None, help="override the master seed")
    run_p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: CAJSIM_WORKERS or 1); results do not depend on it",
    )
    run_p.add_argument("--out", required=True, help="output directory")

    ana_p = sub.add_parser("analytic", help="closed-form outage rows for one preset")
    ana_p.add_argument("--scenario", required=True, help="preset id, see list-scenarios")
    ana_p.add_argument("--out", required=True, help="output directory")

    sub.add_parser("verify", help="run the invariant suite")
    return parser


def _out_dir(raw: str) -> Path:
    out = Path(raw)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_list() -> int:
    for scn in list_scenarios():
        cells = len(scn.sweep_values) * len(scn.series)
        print(
            f"{scn.id:<18} {scn.metric:<7} {len(scn.sweep_values):>3} x "
            f"{len(scn.series):<3} cells={cells:<4} trials={scn.trials:<6} {scn.title}"
        )
    return 0


def _cmd_run(args) -> int:
    scn = load_scenario(args.scenario, trials=args.trials, master_seed=args.seed)
    workers = default_workers() if args.workers is None else args.workers
    out = _out_dir(args.out)
    records, manifest = run_scenario(scn, worker_count=workers)
    csv_path = out / f"{scn.id}.csv"
    emit_csv(records, csv_path)
    manifest.outputs.append(csv_path)
    manifest_path = out / f"{scn.id}.manifest.json"
    manifest.write(manifest_path)
    print(f"{scn.id}: {manifest.total_frames} frames -> {csv_path}")
    print(f"{scn.id}: manifest -> {manifest_path}")
    return 0


def _cmd_analytic(args) -> int:
    scn = load_scenario(args.scenario)
    out = _out_dir(args.out)
    path = out / f"{scn.id}-analytic.csv"
    emit_analytic(scn, path)
    print(f"{scn.id}: closed-form rows -> {path}")
    return 0


def _cmd_verify() -> int:
    for line in run_all():
        print(f"ok - {line}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-scenarios":
            return _cmd_list()
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "analytic":
            return _cmd_analytic(args)
        return _cmd_verify()
    except (ValueError, OSError) as exc:
        print(f"cajsim: error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"cajsim: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
