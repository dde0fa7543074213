"""Pipeline orchestration: file in, verdict out, with the report formats."""
from __future__ import annotations

import json
import resource
import signal
import time
from dataclasses import dataclass, field

from .diagnostics import (
    LayoutError,
    LexError,
    MiniCppError,
    ParseError,
    SolverError,
    TemplateError,
    TypeCheckError,
)
from .encode import encode
from .goto_ir import dump_goto
from .lexer import tokenize
from .lowering import lower
from .object_model import dump_layouts
from .parser import parse
from .results import Verdict, reconstruct
from .sema import synthesize_defaults, typecheck
from .solver import SolveResult, solve
from .smtlib import emit_smtlib
from .symex import SsaSystem, UnwindConfig, symex
from .templates import monomorphize

EXIT_SUCCESSFUL = 0
EXIT_FAILED = 1
EXIT_FRONTEND = 2
EXIT_UNKNOWN = 3

FRONTEND_ERRORS = (LexError, ParseError, TypeCheckError, TemplateError, LayoutError)


@dataclass
class RunConfig:
    input_path: str
    unwind: UnwindConfig = field(default_factory=UnwindConfig)
    solver: str = "builtin"
    show_layouts: bool = False
    show_goto: bool = False
    smt_lib_out: str | None = None
    timeout: float = 900.0
    result_json: str | None = None
    per_property: bool = False
    verbosity: int = 0

    def __post_init__(self) -> None:
        assert self.timeout > 0


class _WallTimeout(Exception):
    pass


def _render_violation(prop, path_override: str | None = None) -> str:
    loc = prop.loc
    f = path_override if path_override is not None else loc.file
    head = "assertion " + prop.description if prop.kind == "assertion" else prop.description
    return (
        "Violated property:\n"
        f"  file {f} line {loc.line} column {loc.column} function {prop.function}\n"
        f"  {head}\n"
    )


@dataclass
class RunOutcome:
    verdict: Verdict
    exit_code: int
    wall_time_s: float
    ssa: SsaSystem | None = None
    model: object = None


def verify_file(config: RunConfig, out=None) -> RunOutcome:
    """Run the whole pipeline; prints reports to `out` (default stdout)."""
    import sys

    out = out if out is not None else sys.stdout
    start = time.monotonic()
    deadline = start + config.timeout

    def remaining() -> float:
        return max(deadline - time.monotonic(), 0.01)

    old_handler = None

    def on_alarm(signum, frame):
        raise _WallTimeout()

    try:
        old_handler = signal.signal(signal.SIGALRM, on_alarm)
        signal.setitimer(signal.ITIMER_REAL, config.timeout)
    except ValueError:
        old_handler = None  # non-main thread: rely on solver-level timeouts

    verdict = Verdict("UNKNOWN", reason="not run")
    ssa = None
    model = None
    code = EXIT_UNKNOWN
    try:
        try:
            with open(config.input_path, encoding="utf-8") as fh:
                source = fh.read()
        except OSError as ex:
            print(f"error: cannot read {config.input_path}: {ex.strerror}", file=sys.stderr)
            return RunOutcome(Verdict("UNKNOWN", reason="input error"), EXIT_FRONTEND, time.monotonic() - start)
        try:
            tokens = tokenize(source, config.input_path)
            ast = parse(tokens, config.input_path)
            ast, _symtab = typecheck(ast)
            ast = synthesize_defaults(ast)
            ast = monomorphize(ast)
            model_ir = lower(ast)
        except FRONTEND_ERRORS as ex:
            print(ex.render(), file=sys.stderr)
            return RunOutcome(Verdict("UNKNOWN", reason="frontend error"), EXIT_FRONTEND, time.monotonic() - start)
        if config.show_layouts:
            out.write(dump_layouts(ast, model_ir.om))
        if config.show_goto:
            out.write(dump_goto(model_ir))
        ssa = symex(model_ir, config.unwind)
        formula = encode(ssa)
        if config.smt_lib_out:
            with open(config.smt_lib_out, "w", encoding="utf-8") as fh:
                fh.write(emit_smtlib(formula))
        if config.per_property:
            verdict, model = _solve_per_property(formula, ssa, config, remaining)
        else:
            verdict, model = _solve_all_claims(formula, ssa, config, remaining)
    except _WallTimeout:
        verdict = Verdict("UNKNOWN", reason="timeout")
    except SolverError as ex:
        print(f"error: {ex.message}", file=sys.stderr)
        verdict = Verdict("UNKNOWN", reason=f"solver error: {ex.message}")
    except MiniCppError as ex:
        print(ex.render(), file=sys.stderr)
        verdict = Verdict("UNKNOWN", reason=ex.message)
    finally:
        if old_handler is not None:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old_handler)

    if verdict.status == "FAILED":
        if config.verbosity >= 1 and verdict.trace is not None:
            out.write("Counterexample:\n")
            for step in verdict.trace.steps:
                out.write(f"  {step.loc}  {step.symbol} = {step.value}\n")
        out.write(_render_violation(verdict.violated))
        out.write("\nVERIFICATION FAILED\n")
        code = EXIT_FAILED
    elif verdict.status == "SUCCESSFUL":
        out.write("VERIFICATION SUCCESSFUL\n")
        code = EXIT_SUCCESSFUL
    else:
        out.write("VERIFICATION UNKNOWN\n")
        code = EXIT_UNKNOWN
    wall = time.monotonic() - start
    if config.result_json:
        write_result_json(verdict, wall, _peak_rss_bytes(), config, config.result_json)
    return RunOutcome(verdict, code, wall, ssa, model)


def _solve_all_claims(formula, ssa, config: RunConfig, remaining) -> tuple[Verdict, object]:
    if not formula.prop_literals:
        return Verdict("SUCCESSFUL"), None
    res = solve(formula, config.solver, timeout=remaining(), verbosity=config.verbosity)
    return _interpret(res, formula, ssa, None)


def _solve_per_property(formula, ssa, config: RunConfig, remaining) -> tuple[Verdict, object]:
    saw_unknown = None
    session = None
    if config.solver == "builtin" and formula.prop_literals:
        from .solver import BuiltinSession

        session = BuiltinSession(formula)
    for i in range(len(formula.prop_literals)):
        if session is not None:
            res = session.solve([i], timeout=remaining())
        else:
            res = solve(formula, config.solver, timeout=remaining(), negate_props=[i], verbosity=config.verbosity)
        if res.status == "sat":
            return _interpret(res, formula, ssa, i)
        if res.status == "unknown":
            saw_unknown = res.reason
    if saw_unknown is not None:
        return Verdict("UNKNOWN", reason=saw_unknown), None
    return Verdict("SUCCESSFUL"), None


def _interpret(res: SolveResult, formula, ssa, violated_index) -> tuple[Verdict, object]:
    if res.status == "unsat":
        return Verdict("SUCCESSFUL"), None
    if res.status == "unknown":
        return Verdict("UNKNOWN", reason=res.reason or "solver unknown"), None
    trace = reconstruct(res.model, ssa, formula, violated_index)
    return Verdict("FAILED", violated=trace.property, trace=trace), res.model


def _peak_rss_bytes() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def write_result_json(verdict: Verdict, wall_time_s: float, peak_rss: int, config: RunConfig, path: str) -> None:
    """Machine-readable result record for harnesses."""
    import sys

    obj: dict = {
        "verdict": verdict.status,
        "wall_time_s": round(wall_time_s, 6),
        "solver": config.solver,
        "unwind_k": config.unwind.k,
        "peak_rss_bytes": peak_rss,
    }
    if verdict.status == "UNKNOWN" and verdict.reason:
        obj["reason"] = verdict.reason
    if verdict.violated is not None:
        p = verdict.violated
        obj["violated_property"] = {
            "file": p.loc.file,
            "line": p.loc.line,
            "column": p.loc.column,
            "function": p.function,
            "description": p.description,
        }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
    except OSError as ex:
        print(f"error: cannot write {path}: {ex.strerror}", file=sys.stderr)
