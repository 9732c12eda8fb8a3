"""Command line entry point.

    fwmav simulate --config run.cfg [--override key=value]... --out log.csv
    fwmav metrics --log log.csv [--settle SECONDS]
    fwmav scenarios [--write DIR]

Exit codes: 0 success, 2 configuration error, 3 aborted run.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from fwmav.harness.config import ConfigError, dumps, read_config, with_overrides
from fwmav.harness.logio import STATUS_OK, LogFormatError, read_log, write_log
from fwmav.harness.metrics import EmptyWindowError, compute_metrics
from fwmav.harness.runner import run_scenario
from fwmav.harness.scenarios import default_config, list_scenarios

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORTED = 3

log = logging.getLogger("fwmav")


def _cmd_simulate(args) -> int:
    try:
        if args.config:
            cfg = read_config(args.config, args.override)
        else:
            cfg = with_overrides(default_config(args.scenario), args.override)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    meta = {"scenario": cfg.sim.scenario, "robot": cfg.sim.robot, "seed": cfg.sim.seed,
            "settle_time": repr(cfg.sim.settle_time)}
    records = []
    for rec in run_scenario(cfg):
        records.append(rec)
    out = Path(args.out)
    write_log(records, out, meta)
    status = records[-1].status if records else STATUS_OK
    log.info("wrote %d records to %s", len(records), out)
    if status != STATUS_OK:
        print(f"run aborted at t={records[-1].t:.4f} s: {status}", file=sys.stderr)
        return EXIT_ABORTED
    if not args.quiet:
        print(compute_metrics(records, cfg.sim.settle_time).format())
    return EXIT_OK


def _cmd_metrics(args) -> int:
    try:
        records, meta = read_log(args.log)
    except (LogFormatError, OSError) as exc:
        print(f"log error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    settle = args.settle if args.settle is not None else float(meta.get("settle_time", 1.0))
    try:
        summary = compute_metrics(records, settle)
    except EmptyWindowError as exc:
        print(f"metrics error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.json:
        print(json.dumps(summary.as_dict(), indent=2))
    else:
        print(summary.format())
    return EXIT_OK if summary.status == STATUS_OK else EXIT_ABORTED


def _cmd_scenarios(args) -> int:
    for name, desc in list_scenarios():
        print(f"{name:<28} {desc}")
    if args.write:
        outdir = Path(args.write)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, _ in list_scenarios():
            (outdir / f"{name}.cfg").write_text(dumps(default_config(name)), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwmav", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write a CSV log")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="scenario config file")
    src.add_argument("--scenario", help="built-in scenario name (no config file)")
    sim.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("-q", "--quiet", action="store_true", help="do not print metrics")
    sim.set_defaults(func=_cmd_simulate)

    met = sub.add_parser("metrics", help="summarize a CSV log")
    met.add_argument("--log", required=True)
    met.add_argument("--settle", type=float, default=None,
                     help="metrics window start, s (default: from log header)")
    met.add_argument("--json", action="store_true")
    met.set_defaults(func=_cmd_metrics)

    sc = sub.add_parser("scenarios", help="list built-in scenarios")
    sc.add_argument("--write", metavar="DIR", help="also write their default configs to DIR")
    sc.set_defaults(func=_cmd_scenarios)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "scenario", None) and args.scenario not in dict(list_scenarios()):
        print(f"config error: unknown scenario {args.scenario!r}", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
