"""Command line entry point: ``hitchin-flows run | list-suites | emit-schema``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigInvalid
from .config import SCHEMA, validate_config
from .runner import run_experiment
from .suites import SUITES


def _run(args):
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        config = validate_config(raw)
    except ConfigInvalid as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return 2
    report = run_experiment(config, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.config).stem
    (out / f"{stem}.csv").write_text(report.to_csv(), encoding="utf-8", newline="")
    (out / f"{stem}.json").write_text(report.to_json() + "\n", encoding="utf-8")
    by_suite = {}
    for r in report.rows:
        ok, total = by_suite.get(r.suite, (0, 0))
        by_suite[r.suite] = (ok + r.passed, total + 1)
    for name, (ok, total) in by_suite.items():
        print(f"{'PASS' if ok == total else 'FAIL'} {name}: {ok}/{total} checks")
    print(f"report: {out / (stem + '.csv')}")
    return report.exit_code


def main(argv=None):
    ap = argparse.ArgumentParser(prog="hitchin-flows", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--out", default="results")
    run.add_argument("--jobs", type=int, default=1)
    sub.add_parser("list-suites", help="list available suites")
    sub.add_parser("emit-schema", help="print the config JSON schema")
    args = ap.parse_args(argv)

    if args.cmd == "run":
        return _run(args)
    if args.cmd == "list-suites":
        for name, spec in SUITES.items():
            print(f"{name:18s} tol={spec.tolerance:<8g} {spec.description}")
        return 0
    print(json.dumps(SCHEMA, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
