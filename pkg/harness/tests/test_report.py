import csv
import io
import json

from bench_harness.report import (
    render_comparison_table,
    render_memory_table,
    render_pass_rate_table,
    report_csv,
    report_json,
)
from bench_harness.runner import BenchReport, CaseResult, TestCase


def mk_report(rows_spec, solver="builtin"):
    rep = BenchReport(solver=solver)
    for cat, name, passed, t, rss in rows_spec:
        case = TestCase(path=f"{cat}/{name}.cpp", expected="SUCCESSFUL", category=cat)
        rep.rows.append(
            CaseResult(case=case, verdict="SUCCESSFUL" if passed else "FAILED", passed=passed, time_s=t, rss_bytes=rss)
        )
    return rep


def test_pass_rate_table_shape():
    rep = mk_report([("alpha", "a", True, 1.0, 10), ("alpha", "b", True, 0.5, 20)])
    text = render_pass_rate_table(rep)
    assert "alpha" in text
    assert "100%" in text
    assert "Total verification time" in text
    assert "1.500s" in text


def test_rounding_whole_percent():
    rows = [("c", f"x{i}", i < 2, 0.0, 0) for i in range(3)]  # 2/3 = 66.67 -> 67
    rep = mk_report(rows)
    assert rep.pass_rate("c") == 67


def test_empty_category_na():
    rep = mk_report([])
    rep2 = mk_report([("real", "a", True, 0.1, 5)])
    assert rep.pass_rate("ghost") is None
    text = render_comparison_table({"one": rep2, "two": rep})
    assert "n/a" in text


def test_totals_equal_sum_of_rows_exactly():
    rows = [("a", "x", True, 0.125, 3), ("a", "y", False, 0.25, 7), ("b", "z", True, 0.5, 11)]
    rep = mk_report(rows)
    assert rep.total_time_s == 0.125 + 0.25 + 0.5
    assert rep.total_rss_bytes == 21
    mem = render_memory_table(rep)
    assert "Total memory" in mem


def test_csv_roundtrip():
    rep = mk_report([("a", "x", True, 0.1, 1024)])
    rows = list(csv.DictReader(io.StringIO(report_csv(rep))))
    assert rows[0]["category"] == "a"
    assert rows[0]["case"] == "x"
    assert rows[0]["passed"] == "1"
    assert int(rows[0]["rss_bytes"]) == 1024


def test_json_totals_match():
    rep = mk_report([("a", "x", True, 0.1, 10), ("b", "y", True, 0.2, 20)])
    obj = json.loads(report_json(rep))
    assert obj["total_rss_bytes"] == 30
    assert abs(obj["total_time_s"] - 0.3) < 1e-9
    assert obj["categories"]["a"]["pass_rate_percent"] == 100
    assert len(obj["rows"]) == 2


def test_comparison_table_one_column_per_solver():
    r1 = mk_report([("a", "x", True, 1.0, 10)], solver="builtin")
    r2 = mk_report([("a", "x", False, 2.0, 20)], solver="other")
    text = render_comparison_table({"builtin": r1, "other": r2})
    head = text.splitlines()[0]
    assert "builtin" in head and "other" in head
    assert "100%" in text and "0%" in text
    assert "Total verification time" in text
    mem = render_comparison_table({"builtin": r1, "other": r2}, memory=True)
    assert "Total memory" in mem
