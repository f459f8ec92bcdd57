"""Command-line interface: `edgeqed run` and `edgeqed sweep`.

Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, ToleranceError
from .report import RunReport, _jsonable
from .scenarios import run_scenario, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgeqed",
        description="Waveguide-QED band-edge scenarios: pulse design, roundtrips, emission.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario from a config file")
    run_p.add_argument("--config", required=True, type=Path, help="key=value config file")
    run_p.add_argument("--out", required=True, type=Path, help="output directory")
    run_p.add_argument("--format", choices=("csv", "json", "both"), default=None)
    run_p.add_argument("--half-res-check", action="store_true",
                       help="re-run the headline scalar at half resolution and flag drift")
    plot_group = run_p.add_mutually_exclusive_group()
    plot_group.add_argument("--plots", dest="plots", action="store_true", default=None)
    plot_group.add_argument("--no-plots", dest="plots", action="store_false")

    sweep_p = sub.add_parser("sweep", help="run a scenario once per parameter value")
    sweep_p.add_argument("--config", required=True, type=Path)
    sweep_p.add_argument("--out", required=True, type=Path)
    sweep_p.add_argument("--param", required=True, help="numeric config key to vary")
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.add_argument("--format", choices=("csv", "json", "both"), default=None)
    plot_group = sweep_p.add_mutually_exclusive_group()
    plot_group.add_argument("--plots", dest="plots", action="store_true", default=None)
    plot_group.add_argument("--no-plots", dest="plots", action="store_false")
    return parser


def _print_report(report: RunReport):
    print(f"scenario: {report.scenario}  (wall-clock {report.wall_clock_s:.2f} s)")
    for key, value in report.scalars.items():
        print(f"  {key} = {value}")
    if report.convergence is not None:
        status = "ok" if report.convergence_ok else "EXCEEDED"
        print(f"  half-res check [{status}]: {report.convergence}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "run":
            report = run_scenario(
                cfg, args.out, fmt=args.format,
                half_res_check=args.half_res_check, make_plots=args.plots,
            )
            _print_report(report)
            if not report.convergence_ok:
                print("numerical-tolerance failure: half-resolution drift", file=sys.stderr)
                return EXIT_TOLERANCE
            return EXIT_OK

        values = [float(v) for v in args.values.split(",") if v.strip()]
        reports = sweep(cfg, args.param, values, args.out, fmt=args.format, make_plots=args.plots)
        summary = []
        failed = False
        for value, rep in zip(values, reports):
            ok = not rep.scalars.get("failed", False)
            failed |= not ok
            summary.append({"value": value, "ok": ok, "scalars": _jsonable(rep.scalars)})
            print(f"{args.param} = {value}: {'ok' if ok else 'FAILED'}")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep_summary.json").write_text(
            json.dumps({"param": args.param, "cells": summary}, indent=2) + "\n", encoding="utf-8"
        )
        return EXIT_TOLERANCE if failed else EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceError as exc:
        print(f"numerical-tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
