import time

from conftest import write_case
from bench_harness.runner import discover_cases, run_suite


def test_discovery_and_missing_expect(tmp_path, fake_verifier):
    root = tmp_path / "corpus"
    write_case(root, "cat", "a", "SUCCESSFUL")
    (root / "cat" / "orphan.cpp").write_text("int main() { return 0; }\n")
    cases = discover_cases(str(root))
    assert len(cases) == 2
    orphan = [c for c in cases if c.name == "orphan"][0]
    assert orphan.config_error
    # the suite continues past the configuration error
    report = run_suite(str(root), verifier=fake_verifier, timeout=30)
    by_name = {r.case.name: r for r in report.rows}
    assert by_name["a"].passed
    assert by_name["orphan"].verdict == "CONFIG-ERROR"
    assert not by_name["orphan"].passed


def test_verdict_match_semantics(small_corpus, fake_verifier):
    report = run_suite(str(small_corpus), verifier=fake_verifier, timeout=30)
    by_name = {r.case.name: r for r in report.rows}
    assert by_name["good"].passed  # SUCCESSFUL expected, SUCCESSFUL reported
    assert by_name["bad"].passed  # FAILED expected on an unsafe program
    assert not by_name["wrong"].passed  # SUCCESSFUL reported, FAILED expected
    assert report.pass_rate("alpha") == 100
    assert report.pass_rate("beta") == 0


def test_timeout_capped_at_limit(tmp_path, fake_verifier):
    root = tmp_path / "corpus"
    write_case(root, "slow", "sleepy", "SUCCESSFUL", body="// SLEEP: 30\n// VERDICT: SUCCESSFUL\n")
    t0 = time.monotonic()
    report = run_suite(str(root), verifier=fake_verifier, timeout=1.0)
    wall = time.monotonic() - t0
    (row,) = report.rows
    assert row.timed_out
    assert row.verdict == "UNKNOWN"
    assert not row.passed
    assert row.time_s == 1.0  # rectified to the configured limit
    assert wall < 20


def test_crash_isolated(tmp_path, fake_verifier):
    root = tmp_path / "corpus"
    write_case(root, "c", "boom", "SUCCESSFUL", body="// CRASH\n")
    write_case(root, "c", "fine", "SUCCESSFUL")
    report = run_suite(str(root), verifier=fake_verifier, timeout=30)
    by_name = {r.case.name: r for r in report.rows}
    assert by_name["boom"].verdict == "CRASH"
    assert not by_name["boom"].passed
    assert by_name["fine"].passed


def test_rss_collected(small_corpus, fake_verifier):
    report = run_suite(str(small_corpus), verifier=fake_verifier, timeout=30)
    for r in report.rows:
        assert r.rss_bytes > 0
    assert report.total_rss_bytes == sum(r.rss_bytes for r in report.rows)


def test_parallel_matches_serial_verdicts(small_corpus, fake_verifier):
    serial = run_suite(str(small_corpus), verifier=fake_verifier, timeout=30, parallelism=1)
    parallel = run_suite(str(small_corpus), verifier=fake_verifier, timeout=30, parallelism=3)
    v1 = sorted((r.case.name, r.verdict, r.passed) for r in serial.rows)
    v2 = sorted((r.case.name, r.verdict, r.passed) for r in parallel.rows)
    assert v1 == v2


def test_per_case_flags_forwarded(tmp_path):
    import json
    import os
    import stat
    import sys

    # a verifier that records its argv
    rec = tmp_path / "argv.json"
    script = tmp_path / "recorder"
    script.write_text(
        "#!/usr/bin/env python3\n"
        "import json, sys\n"
        f"json.dump(sys.argv[1:], open({str(rec)!r}, 'w'))\n"
        "args = sys.argv[1:]\n"
        "out = args[args.index('--result-json') + 1]\n"
        "json.dump({'verdict': 'SUCCESSFUL', 'wall_time_s': 0.0}, open(out, 'w'))\n"
        "print('VERIFICATION SUCCESSFUL')\n"
    )
    os.chmod(script, os.stat(script).st_mode | stat.S_IEXEC)
    root = tmp_path / "corpus"
    write_case(root, "f", "flagged", "SUCCESSFUL", flags="--overflow-check --unwind 12")
    run_suite(str(root), verifier=f"{sys.executable} {script}", timeout=30, solver="builtin")
    argv = json.load(open(rec))
    assert "--overflow-check" in argv
    assert "--unwind" in argv and "12" in argv
    assert "--solver" in argv and "builtin" in argv
