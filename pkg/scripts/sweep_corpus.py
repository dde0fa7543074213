#!/usr/bin/env python3
"""In-process corpus sweep with per-category timing (quick sanity run).

For process-isolated runs with RSS accounting, use the bench harness
package instead (harness/).
"""
import glob
import io
import pathlib
import time
from collections import defaultdict

from minicpp_bmc.driver import RunConfig, verify_file
from minicpp_bmc.symex import UnwindConfig

ROOT = pathlib.Path(__file__).resolve().parent.parent


def unwind_from_flags(flags):
    k, ua, ov, bd, mem = 10, False, False, False, False
    it = iter(flags)
    for f in it:
        if f == "--unwind":
            k = int(next(it))
        elif f == "--unwinding-assertions":
            ua = True
        elif f == "--overflow-check":
            ov = True
        elif f == "--bounds-check":
            bd = True
        elif f == "--memory-check":
            mem = True
    return UnwindConfig(k=k, unwinding_assertions=ua, overflow=ov, bounds=bd, memory=mem)


def main() -> int:
    stats = defaultdict(lambda: [0, 0, 0.0])  # passes, cases, seconds
    for cpp in sorted(glob.glob(str(ROOT / "corpus" / "*" / "*.cpp"))):
        lines = open(cpp[:-4] + ".expect").read().splitlines()
        expect = lines[0].strip()
        flags = lines[1].split() if len(lines) > 1 else []
        cat = cpp.split("/")[-2]
        t0 = time.monotonic()
        outcome = verify_file(
            RunConfig(input_path=cpp, unwind=unwind_from_flags(flags), timeout=120), out=io.StringIO()
        )
        dt = time.monotonic() - t0
        stats[cat][1] += 1
        stats[cat][2] += dt
        if outcome.verdict.status == expect:
            stats[cat][0] += 1
        else:
            print(f"  UNEXPECTED {cpp}: {outcome.verdict.status} (wanted {expect})")
    total_t = 0.0
    print(f"{'category':<28} {'pass rate':>10} {'time':>8}")
    for cat in sorted(stats):
        p, n, t = stats[cat]
        total_t += t
        print(f"{cat:<28} {100 * p // n:>9}% {t:>7.2f}s")
    print(f"{'total':<28} {'':>10} {total_t:>7.2f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
