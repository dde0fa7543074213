"""Table rendering and machine-readable outputs for bench reports."""
from __future__ import annotations

import csv
import io
import json

from .runner import BenchReport


def _fmt_mb(nbytes: int) -> str:
    return f"{nbytes / (1024 * 1024):.0f} MB"


def _rate_text(rate: int | None) -> str:
    return "n/a" if rate is None else f"{rate}%"


def render_pass_rate_table(report: BenchReport) -> str:
    """Pass rate per sub-benchmark with an accumulative-time total row."""
    lines = [f"{'Sub-Benchmarks':<28} {'pass rate':>10}"]
    for cat in report.categories:
        lines.append(f"{cat:<28} {_rate_text(report.pass_rate(cat)):>10}")
    lines.append(f"{'Total verification time':<28} {report.total_time_s:>9.3f}s")
    return "\n".join(lines) + "\n"


def render_memory_table(report: BenchReport) -> str:
    """Cumulative maximum RSS per sub-benchmark plus a total-memory row."""
    lines = [f"{'Sub-Benchmarks':<28} {'max RSS':>12}"]
    for cat in report.categories:
        total = sum(r.rss_bytes for r in report.category_rows(cat))
        lines.append(f"{cat:<28} {_fmt_mb(total):>12}")
    lines.append(f"{'Total memory':<28} {_fmt_mb(report.total_rss_bytes):>12}")
    return "\n".join(lines) + "\n"


def render_comparison_table(reports: dict[str, BenchReport], memory: bool = False) -> str:
    """One column per solver: pass rates, plus total time or total memory."""
    labels = list(reports)
    cats: list[str] = []
    for rep in reports.values():
        for c in rep.categories:
            if c not in cats:
                cats.append(c)
    head = f"{'Sub-Benchmarks':<28}" + "".join(f" {lb:>14}" for lb in labels)
    lines = [head]
    for cat in cats:
        row = f"{cat:<28}"
        for lb in labels:
            row += f" {_rate_text(reports[lb].pass_rate(cat)):>14}"
        lines.append(row)
    if memory:
        total = f"{'Total memory':<28}"
        for lb in labels:
            total += f" {_fmt_mb(reports[lb].total_rss_bytes):>14}"
    else:
        total = f"{'Total verification time':<28}"
        for lb in labels:
            total += f" {reports[lb].total_time_s:>13.3f}s"
    lines.append(total)
    return "\n".join(lines) + "\n"


def render_tables(report: BenchReport) -> str:
    return render_pass_rate_table(report) + "\n" + render_memory_table(report)


def report_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["category", "case", "expected", "verdict", "passed", "time_s", "rss_bytes", "error"])
    for r in report.rows:
        w.writerow(
            [
                r.case.category,
                r.case.name,
                r.case.expected,
                r.verdict,
                int(r.passed),
                f"{r.time_s:.6f}",
                r.rss_bytes,
                r.error,
            ]
        )
    return buf.getvalue()


def report_json(report: BenchReport) -> str:
    obj = {
        "solver": report.solver,
        "timeout_s": report.timeout,
        "categories": {
            cat: {
                "cases": len(report.category_rows(cat)),
                "pass_rate_percent": report.pass_rate(cat),
                "time_s": round(sum(r.time_s for r in report.category_rows(cat)), 6),
                "rss_bytes": sum(r.rss_bytes for r in report.category_rows(cat)),
            }
            for cat in report.categories
        },
        "total_time_s": round(report.total_time_s, 6),
        "total_rss_bytes": report.total_rss_bytes,
        "rows": [
            {
                "category": r.case.category,
                "case": r.case.name,
                "expected": r.case.expected,
                "verdict": r.verdict,
                "passed": r.passed,
                "time_s": round(r.time_s, 6),
                "rss_bytes": r.rss_bytes,
                "timed_out": r.timed_out,
                "error": r.error,
            }
            for r in report.rows
        ],
    }
    return json.dumps(obj, indent=2) + "\n"
