#!/usr/bin/env python3
"""Run the two flagship verification examples and show their reports."""
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
EXAMPLES = [
    ROOT / "corpus" / "polymorphism-sub" / "bird_penguin.cpp",
    ROOT / "corpus" / "gcc-template-tests-sub" / "friend18.cpp",
]


def main() -> int:
    for path in EXAMPLES:
        print(f"=== {path.name} ===")
        r = subprocess.run(
            [sys.executable, "-m", "minicpp_bmc.cli", str(path), "--show-goto-functions"],
            capture_output=True,
            text=True,
        )
        goto, _, verdict = r.stdout.partition("VERIFICATION")
        interesting = [
            ln for ln in goto.splitlines() if "Bird@Penguin" in ln or "thunk::" in ln or "foo<5678>" in ln
        ]
        for ln in interesting[:6]:
            print(ln)
        print("VERIFICATION" + verdict.rstrip())
        print(f"exit code: {r.returncode}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
