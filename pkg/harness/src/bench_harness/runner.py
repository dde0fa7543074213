"""Case discovery and process-isolated verifier runs with RSS accounting."""
from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_TIMEOUT = 900.0
KILL_GRACE = 5.0


@dataclass
class TestCase:
    __test__ = False  # not a pytest class

    path: str
    expected: str  # SUCCESSFUL | FAILED
    category: str
    flags: list = field(default_factory=list)
    config_error: str = ""

    @property
    def name(self) -> str:
        return Path(self.path).stem


@dataclass
class CaseResult:
    case: TestCase
    verdict: str = ""
    passed: bool = False
    time_s: float = 0.0
    rss_bytes: int = 0
    timed_out: bool = False
    error: str = ""


@dataclass
class BenchReport:
    solver: str = ""
    rows: list = field(default_factory=list)  # CaseResult
    timeout: float = DEFAULT_TIMEOUT

    @property
    def categories(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if r.case.category not in seen:
                seen.append(r.case.category)
        return seen

    def category_rows(self, cat: str) -> list:
        return [r for r in self.rows if r.case.category == cat]

    def pass_rate(self, cat: str) -> int | None:
        rows = self.category_rows(cat)
        if not rows:
            return None
        return round(100 * sum(1 for r in rows if r.passed) / len(rows))

    @property
    def total_time_s(self) -> float:
        return sum(r.time_s for r in self.rows)

    @property
    def total_rss_bytes(self) -> int:
        return sum(r.rss_bytes for r in self.rows)


def discover_cases(corpus_dir: str) -> list[TestCase]:
    """Collect `<category>/<case>.cpp` + `<case>.expect` pairs."""
    out: list[TestCase] = []
    root = Path(corpus_dir)
    for cpp in sorted(root.glob("*/*.cpp")):
        category = cpp.parent.name
        expect_path = cpp.with_suffix(".expect")
        if not expect_path.exists():
            out.append(
                TestCase(str(cpp), "", category, config_error=f"missing {expect_path.name}")
            )
            continue
        lines = expect_path.read_text().splitlines()
        expected = lines[0].strip() if lines else ""
        if expected not in ("SUCCESSFUL", "FAILED"):
            out.append(
                TestCase(str(cpp), "", category, config_error=f"bad expected verdict {expected!r}")
            )
            continue
        flags = lines[1].split() if len(lines) > 1 and lines[1].strip() else []
        out.append(TestCase(str(cpp), expected, category, flags))
    return out


def resolve_verifier(spec: str | None) -> list[str]:
    """Turn a verifier selection into an argv prefix."""
    if spec:
        parts = spec.split()
        exe = shutil.which(parts[0]) or parts[0]
        return [exe] + parts[1:]
    found = shutil.which("minicpp-bmc")
    if found:
        return [found]
    return [sys.executable, "-m", "minicpp_bmc.cli"]


def _wait_with_rusage(proc: subprocess.Popen, deadline: float):
    """Reap the child with per-process rusage; kill past the deadline."""
    killed = threading.Event()

    def watchdog():
        remaining = deadline - time.monotonic()
        if remaining > 0 and proc.poll() is None:
            if killed.wait(remaining):
                return
        if proc.poll() is None:
            killed.set()
            proc.terminate()
            end = time.monotonic() + KILL_GRACE
            while proc.poll() is None and time.monotonic() < end:
                time.sleep(0.05)
            if proc.poll() is None:
                proc.kill()

    t = threading.Thread(target=watchdog, daemon=True)
    t.start()
    _pid, status, ru = os.wait4(proc.pid, 0)
    proc.returncode = os.waitstatus_to_exitcode(status)
    killed.set()
    t.join(timeout=KILL_GRACE + 1)
    return proc.returncode, ru


def run_case(
    verifier: list[str], case: TestCase, timeout: float, solver: str | None = None
) -> CaseResult:
    res = CaseResult(case=case)
    if case.config_error:
        res.verdict = "CONFIG-ERROR"
        res.error = case.config_error
        return res
    with tempfile.NamedTemporaryFile(suffix=".json", delete=False) as tf:
        json_path = tf.name
    cmd = verifier + [case.path, "--result-json", json_path, "--timeout", str(timeout)]
    cmd += case.flags
    if solver:
        cmd += ["--solver", solver]
    start = time.monotonic()
    try:
        proc = subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        code, ru = _wait_with_rusage(proc, start + timeout + KILL_GRACE)
        wall = time.monotonic() - start
        res.rss_bytes = ru.ru_maxrss * 1024  # ru_maxrss is KiB on Linux
        record = {}
        try:
            with open(json_path) as fh:
                record = json.load(fh)
        except (OSError, json.JSONDecodeError):
            pass
        res.verdict = record.get("verdict", "")
        if not res.verdict:
            out = proc.stdout.read() if proc.stdout else ""
            lines = [ln for ln in out.splitlines() if ln.strip()]
            tail = lines[-1] if lines else ""
            res.verdict = {
                "VERIFICATION SUCCESSFUL": "SUCCESSFUL",
                "VERIFICATION FAILED": "FAILED",
                "VERIFICATION UNKNOWN": "UNKNOWN",
            }.get(tail, "")
        res.timed_out = wall >= timeout or record.get("reason") == "timeout"
        if res.timed_out:
            res.verdict = "UNKNOWN"
            res.time_s = timeout  # rectified: capped at the configured limit
        else:
            res.time_s = record.get("wall_time_s", wall)
        if not res.verdict:
            res.verdict = "CRASH"
            res.error = f"exit code {code}"
        res.passed = res.verdict == case.expected
    except OSError as ex:
        res.verdict = "CRASH"
        res.error = str(ex)
        res.time_s = time.monotonic() - start
    finally:
        try:
            os.unlink(json_path)
        except OSError:
            pass
    return res


def run_suite(
    corpus_dir: str,
    verifier: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    parallelism: int = 1,
    solver: str | None = None,
    progress=None,
) -> BenchReport:
    """Run every case in the corpus; one verifier process per case."""
    cases = discover_cases(corpus_dir)
    argv = resolve_verifier(verifier)
    report = BenchReport(solver=solver or "builtin", timeout=timeout)

    def work(case: TestCase) -> CaseResult:
        r = run_case(argv, case, timeout, solver)
        if progress is not None:
            progress(r)
        return r

    if parallelism <= 1:
        report.rows = [work(c) for c in cases]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            report.rows = list(pool.map(work, cases))
    return report
