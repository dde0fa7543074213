"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys

from .driver import EXIT_FRONTEND, RunConfig, verify_file
from .symex import UnwindConfig


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="minicpp-bmc",
        description="Bounded model checker for the MiniC++ subset: vtable-aware "
        "GOTO conversion, bounded symbolic execution, SMT bit-vector backend.",
    )
    p.add_argument("input", help="MiniC++ source file")
    p.add_argument("--unwind", type=int, default=10, metavar="K", help="loop/recursion bound (default 10)")
    p.add_argument("--unwinding-assertions", action="store_true", help="assert that loop bounds suffice")
    p.add_argument("--overflow-check", action="store_true", help="check signed arithmetic overflow")
    p.add_argument("--bounds-check", action="store_true", help="check array index bounds")
    p.add_argument("--memory-check", action="store_true", help="check pointer validity and deallocation")
    p.add_argument("--solver", default="builtin", help="'builtin' or an SMT-LIB2 solver name/path")
    p.add_argument("--smt-lib-out", metavar="PATH", help="dump the SMT-LIB2 script")
    p.add_argument("--show-goto-functions", action="store_true", help="print the GOTO program")
    p.add_argument("--show-layouts", action="store_true", help="print class layouts and vtables")
    p.add_argument("--timeout", type=float, default=900.0, metavar="SEC", help="wall-clock limit (default 900)")
    p.add_argument("--result-json", metavar="PATH", help="write a machine-readable result record")
    p.add_argument("--per-property", action="store_true", help="one solver query per property")
    p.add_argument("--verbosity", type=int, default=0, help="0 quiet, 1 trace and solver stderr")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.unwind < 1:
        print("error: --unwind must be >= 1", file=sys.stderr)
        return EXIT_FRONTEND
    if args.timeout <= 0:
        print("error: --timeout must be positive", file=sys.stderr)
        return EXIT_FRONTEND
    cfg = RunConfig(
        input_path=args.input,
        unwind=UnwindConfig(
            k=args.unwind,
            unwinding_assertions=args.unwinding_assertions,
            overflow=args.overflow_check,
            bounds=args.bounds_check,
            memory=args.memory_check,
        ),
        solver=args.solver,
        show_layouts=args.show_layouts,
        show_goto=args.show_goto_functions,
        smt_lib_out=args.smt_lib_out,
        timeout=args.timeout,
        result_json=args.result_json,
        per_property=args.per_property,
        verbosity=args.verbosity,
    )
    return verify_file(cfg).exit_code


if __name__ == "__main__":
    sys.exit(main())
