#!/usr/bin/env python3
"""Emit seeded random MiniC++ programs (the differential-test inputs)."""
import argparse
import pathlib

from minicpp_bmc.randprog import generate_program


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--start-seed", type=int, default=0)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for seed in range(args.start_seed, args.start_seed + args.count):
        (args.outdir / f"gen_{seed:04d}.cpp").write_text(generate_program(seed))
    print(f"wrote {args.count} programs to {args.outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
