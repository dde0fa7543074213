import json
import subprocess
import sys

import pytest

from conftest import BIRD_PENGUIN, FRIEND18


def run_cli(*args, timeout=120):
    return subprocess.run(
        [sys.executable, "-m", "minicpp_bmc.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def test_bird_penguin_successful_exit0():
    r = run_cli(BIRD_PENGUIN)
    assert r.returncode == 0
    assert r.stdout.rstrip().splitlines()[-1] == "VERIFICATION SUCCESSFUL"


def test_friend18_block_and_exit1():
    r = run_cli(FRIEND18)
    assert r.returncode == 1
    block = r.stdout.replace(FRIEND18, "tmp2.cpp")
    assert block == (
        "Violated property:\n"
        "  file tmp2.cpp line 13 column 3 function main\n"
        "  assertion foo<5678>(bring)!=12345678\n"
        "\n"
        "VERIFICATION FAILED\n"
    )


def test_missing_file_exit2():
    r = run_cli("/does/not/exist.cpp")
    assert r.returncode == 2
    assert "cannot read" in r.stderr


def test_frontend_error_exit2(tmp_path):
    p = tmp_path / "bad.cpp"
    p.write_text("int main() { unknown_symbol; }\n")
    r = run_cli(str(p))
    assert r.returncode == 2
    assert "error" in r.stderr


def test_verdict_is_last_line_with_dumps():
    r = run_cli(BIRD_PENGUIN, "--show-goto-functions", "--show-layouts")
    lines = r.stdout.rstrip().splitlines()
    assert lines[-1] == "VERIFICATION SUCCESSFUL"
    assert "thunk::Penguin::doit(Bird*)" in r.stdout
    assert "Bird@Penguin" in r.stdout


def test_result_json_failed(tmp_path):
    out = tmp_path / "r.json"
    r = run_cli(FRIEND18, "--result-json", str(out))
    assert r.returncode == 1
    obj = json.loads(out.read_text())
    assert obj["verdict"] == "FAILED"
    assert obj["violated_property"]["line"] == 13
    assert obj["violated_property"]["column"] == 3
    assert obj["violated_property"]["function"] == "main"
    assert obj["solver"] == "builtin"
    assert obj["unwind_k"] == 10
    assert obj["wall_time_s"] >= 0


def test_result_json_successful(tmp_path):
    out = tmp_path / "r.json"
    r = run_cli(BIRD_PENGUIN, "--result-json", str(out))
    assert r.returncode == 0
    obj = json.loads(out.read_text())
    assert obj["verdict"] == "SUCCESSFUL"
    assert "violated_property" not in obj


def test_timeout_unknown_exit3(tmp_path):
    p = tmp_path / "slow.cpp"
    # a loop long enough that symex at large k cannot finish instantly
    p.write_text(
        "int main() {\n"
        "  int s = 0;\n"
        "  int n = nondet_int();\n"
        "  for (int i = 0; i < n; i = i + 1) { s = s + i * i - s / 3; }\n"
        "  assert(s != 123456789);\n"
        "  return 0;\n"
        "}\n"
    )
    out = tmp_path / "r.json"
    r = run_cli(str(p), "--unwind", "4000", "--timeout", "1", "--result-json", str(out), timeout=60)
    assert r.returncode == 3
    assert r.stdout.rstrip().splitlines()[-1] == "VERIFICATION UNKNOWN"
    obj = json.loads(out.read_text())
    assert obj["verdict"] == "UNKNOWN"
    assert obj["reason"] == "timeout"


def test_smt_lib_out(tmp_path):
    out = tmp_path / "f.smt2"
    run_cli(FRIEND18, "--smt-lib-out", str(out))
    text = out.read_text()
    assert text.splitlines()[0] == "(set-option :produce-models true)"
    assert "(set-logic QF_ABV)" in text
    assert text.rstrip().endswith("(get-model)")


def test_per_property_mode():
    r = run_cli(FRIEND18, "--per-property")
    assert r.returncode == 1
    assert "VERIFICATION FAILED" in r.stdout
    r2 = run_cli(BIRD_PENGUIN, "--per-property")
    assert r2.returncode == 0


def test_verbosity_prints_trace():
    r = run_cli(FRIEND18, "--verbosity", "1")
    assert "Counterexample:" in r.stdout
    assert "12345678" in r.stdout


def test_checks_change_verdict(tmp_path):
    p = tmp_path / "ovf.cpp"
    p.write_text("int main(){ int x = 2147483647; int y = x + 1; return 0; }\n")
    assert run_cli(str(p)).returncode == 0
    assert run_cli(str(p), "--overflow-check").returncode == 1


def test_unwinding_assertions_flag(tmp_path):
    p = tmp_path / "loop.cpp"
    p.write_text(
        "int main(){ int s = 0; int i = 1; while (i <= 5) { s = s + i; i = i + 1; } assert(s == 15); return 0; }\n"
    )
    assert run_cli(str(p), "--unwind", "3").returncode == 0  # bound silently too small
    assert run_cli(str(p), "--unwind", "3", "--unwinding-assertions").returncode == 1
    assert run_cli(str(p), "--unwind", "10", "--unwinding-assertions").returncode == 0
