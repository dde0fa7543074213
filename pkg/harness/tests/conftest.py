import os
import stat
import sys
import textwrap

import pytest

FAKE_VERIFIER = r"""
#!/usr/bin/env python3
# Fake verifier for harness tests. Case files carry directives:
#   // VERDICT: SUCCESSFUL|FAILED|UNKNOWN
#   // SLEEP: <seconds>
#   // CRASH
import json, sys, time

def main():
    args = sys.argv[1:]
    src = args[0]
    out = None
    if "--result-json" in args:
        out = args[args.index("--result-json") + 1]
    text = open(src).read()
    verdict = "SUCCESSFUL"
    for line in text.splitlines():
        if line.startswith("// VERDICT:"):
            verdict = line.split(":", 1)[1].strip()
        if line.startswith("// SLEEP:"):
            time.sleep(float(line.split(":", 1)[1]))
        if line.startswith("// CRASH"):
            sys.exit(42)
    if out:
        json.dump({"verdict": verdict, "wall_time_s": 0.01, "solver": "fake", "unwind_k": 10}, open(out, "w"))
    print("VERIFICATION " + verdict)
    sys.exit({"SUCCESSFUL": 0, "FAILED": 1}.get(verdict, 3))

main()
"""


@pytest.fixture
def fake_verifier(tmp_path):
    path = tmp_path / "fake-verifier"
    path.write_text(FAKE_VERIFIER.lstrip())
    os.chmod(path, os.stat(path).st_mode | stat.S_IEXEC)
    return f"{sys.executable} {path}"


def write_case(root, category, name, expected, body="", flags=""):
    d = root / category
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{name}.cpp").write_text(body or f"// VERDICT: {expected}\nint main() {{ return 0; }}\n")
    expect = expected + "\n" + (flags + "\n" if flags else "")
    (d / f"{name}.expect").write_text(expect)


@pytest.fixture
def small_corpus(tmp_path):
    root = tmp_path / "corpus"
    write_case(root, "alpha", "good", "SUCCESSFUL")
    write_case(root, "alpha", "bad", "FAILED", body="// VERDICT: FAILED\nint main() { return 1; }\n")
    write_case(root, "beta", "wrong", "FAILED", body="// VERDICT: SUCCESSFUL\n")
    return root
