"""Harness command line: run a corpus, print tables, write report files."""
from __future__ import annotations

import argparse
import pathlib
import sys

from .report import (
    render_comparison_table,
    render_memory_table,
    render_pass_rate_table,
    report_csv,
    report_json,
)
from .runner import DEFAULT_TIMEOUT, run_suite


def parse_solver_spec(spec: str) -> tuple[str, str]:
    """'label=cmd' or plain 'cmd' (label defaults to the command)."""
    if "=" in spec:
        label, cmd = spec.split("=", 1)
        return label, cmd
    return spec, spec


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="minicpp-bench",
        description="Run the verifier over a categorized corpus in separate "
        "processes and report pass rates, time, and memory.",
    )
    ap.add_argument("corpus", help="corpus directory (<category>/<case>.cpp + .expect)")
    ap.add_argument("--verifier", help="verifier command (default: minicpp-bmc on PATH)")
    ap.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="per-case limit in seconds")
    ap.add_argument("--parallelism", type=int, default=1, help="concurrent verifier processes")
    ap.add_argument(
        "--solver",
        action="append",
        default=[],
        metavar="LABEL=NAME",
        help="verifier --solver selection; repeat for a comparison table",
    )
    ap.add_argument("--report-dir", type=pathlib.Path, help="write report.csv and report.json here")
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args(argv)

    solvers = [parse_solver_spec(s) for s in args.solver] or [("builtin", None)]

    def progress(r):
        if not args.quiet:
            mark = "ok " if r.passed else "FAIL"
            print(f"  [{mark}] {r.case.category}/{r.case.name}: {r.verdict} {r.time_s:.2f}s", flush=True)

    reports = {}
    for label, solver_cmd in solvers:
        if not args.quiet and len(solvers) > 1:
            print(f"== solver: {label} ==")
        reports[label] = run_suite(
            args.corpus,
            verifier=args.verifier,
            timeout=args.timeout,
            parallelism=args.parallelism,
            solver=solver_cmd,
            progress=progress,
        )

    first = next(iter(reports.values()))
    print()
    print(render_pass_rate_table(first))
    print(render_memory_table(first))
    if len(reports) > 1:
        print(render_comparison_table(reports))
        print(render_comparison_table(reports, memory=True))

    if args.report_dir:
        args.report_dir.mkdir(parents=True, exist_ok=True)
        for label, rep in reports.items():
            suffix = f".{label}" if len(reports) > 1 else ""
            (args.report_dir / f"report{suffix}.csv").write_text(report_csv(rep))
            (args.report_dir / f"report{suffix}.json").write_text(report_json(rep))
        if not args.quiet:
            print(f"reports written to {args.report_dir}")

    all_passed = all(r.passed for rep in reports.values() for r in rep.rows)
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
