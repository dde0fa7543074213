"""Solving front: built-in bit-blasting solver or an external SMT process."""
from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .diagnostics import SolverError
from .encode import ArrayVal, Formula, eval_with_model
from .sat import CdclSolver, SatTimeout
from .smtlib import emit_smtlib, parse_model

KNOWN_SOLVERS = ("z3", "cvc5", "cvc4", "bitwuzla", "boolector", "mathsat", "yices-smt2")


@dataclass
class SolveResult:
    status: str  # 'sat' | 'unsat' | 'unknown'
    model: dict = field(default_factory=dict)
    reason: str = ""


def find_external_solver(name_or_path: str) -> list[str] | None:
    """Resolve a solver selection to an argv prefix, or None if absent."""
    parts = name_or_path.split()
    exe = shutil.which(parts[0])
    if exe is None and os.path.isfile(parts[0]) and os.access(parts[0], os.X_OK):
        exe = parts[0]
    if exe is None:
        return None
    return [exe] + parts[1:]


def any_external_solver() -> str | None:
    for name in KNOWN_SOLVERS:
        if shutil.which(name):
            return name
    return None


def solve(
    formula: Formula,
    solver: str = "builtin",
    timeout: float | None = None,
    negate_props: list | None = None,
    verbosity: int = 0,
) -> SolveResult:
    """Decide sat(C and (not p_i or ...)) for the selected property set."""
    targets = negate_props if negate_props is not None else list(range(len(formula.prop_literals)))
    if not targets:
        return SolveResult("unsat")
    if solver == "builtin":
        return _solve_builtin(formula, timeout, negate_props)
    return _solve_external(formula, solver, timeout, negate_props, verbosity)


class BuiltinSession:
    """Blast once, then answer any number of property queries with
    assumption-based incremental SAT calls."""

    def __init__(self, formula: Formula):
        from .bitblast import blast

        self.formula = formula
        self.bl, self.prop_vars = blast(formula, negate_props=[])
        self.sat = CdclSolver(self.bl.b.nvars, self.bl.b.clauses)
        self._selectors: dict[tuple, int] = {}

    def solve(self, negate_props: list | None, timeout: float | None = None) -> SolveResult:
        targets = negate_props if negate_props is not None else list(range(len(self.prop_vars)))
        if not targets:
            return SolveResult("unsat")
        self.sat.deadline = time.monotonic() + timeout if timeout else None
        self.sat.backtrack(0)
        if len(targets) == 1:
            assumptions = [-self.prop_vars[targets[0]]]
        else:
            key = tuple(targets)
            sel = self._selectors.get(key)
            if sel is None:
                sel = self.sat.nvars = self.sat.nvars + 1
                for arr in (self.sat.assign, self.sat.level):
                    arr.append(0)
                self.sat.reason.append(None)
                self.sat.activity.append(0.0)
                self.sat.phase.append(-1)
                self.sat.add_clause([-sel] + [-self.prop_vars[i] for i in targets])
                self._selectors[key] = sel
            assumptions = [sel]
        try:
            status = self.sat.solve(assumptions)
        except SatTimeout:
            return SolveResult("unknown", reason="timeout")
        if status == "unsat":
            return SolveResult("unsat")
        return SolveResult("sat", model=_extract_model(self.formula, self.bl, self.sat.model()))


def _extract_model(formula: Formula, bl, assign: dict) -> dict:
    model: dict = {}
    for name, bits in bl.sym_bits.items():
        v = 0
        for i, lit in enumerate(bits):
            if assign.get(abs(lit), False) == (lit > 0):
                v |= 1 << i
        if v >= 1 << (formula.width - 1):
            v -= 1 << formula.width
        model[name] = v
    for name, lit in bl.sym_bool.items():
        model[name] = assign.get(abs(lit), False) == (lit > 0)
    for name, sort in formula.decls.items():
        if sort == "arr" and name in formula.array_defs:
            try:
                model[name] = eval_with_model(formula.array_defs[name], model, formula.width)
            except Exception:
                model[name] = ArrayVal(0)
    return model


def _solve_builtin(formula: Formula, timeout: float | None, negate_props) -> SolveResult:
    from .bitblast import blast

    deadline = time.monotonic() + timeout if timeout else None
    bl, _props = blast(formula, negate_props)
    sat_solver = CdclSolver(bl.b.nvars, bl.b.clauses, deadline=deadline)
    try:
        status = sat_solver.solve()
    except SatTimeout:
        return SolveResult("unknown", reason="timeout")
    if status == "unsat":
        return SolveResult("unsat")
    assign = sat_solver.model()
    model: dict = {}
    for name, bits in bl.sym_bits.items():
        v = 0
        for i, lit in enumerate(bits):
            if assign.get(abs(lit), False) == (lit > 0):
                v |= 1 << i
        if v >= 1 << (formula.width - 1):
            v -= 1 << formula.width
        model[name] = v
    for name, lit in bl.sym_bool.items():
        model[name] = assign.get(abs(lit), False) == (lit > 0)
    # array symbols: evaluate their definitional chains under the model
    for name, sort in formula.decls.items():
        if sort == "arr" and name in formula.array_defs:
            try:
                model[name] = eval_with_model(formula.array_defs[name], model, formula.width)
            except Exception:
                model[name] = ArrayVal(0)
    return SolveResult("sat", model=model)


def _solve_external(
    formula: Formula, solver: str, timeout: float | None, negate_props, verbosity: int
) -> SolveResult:
    argv = find_external_solver(solver)
    if argv is None:
        raise SolverError(f"external solver '{solver}' not found")
    script = emit_smtlib(formula, negate_props)
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as tf:
        tf.write(script)
        path = tf.name
    try:
        proc = subprocess.Popen(
            argv + [path], stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True
        )
        try:
            out, err = proc.communicate(timeout=timeout)
        except subprocess.TimeoutExpired:
            proc.terminate()
            try:
                proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
            return SolveResult("unknown", reason="timeout")
        if verbosity >= 1 and err.strip():
            import sys

            print(err, file=sys.stderr)
        lines = [ln.strip() for ln in out.splitlines() if ln.strip()]
        if not lines:
            raise SolverError(f"solver produced no output (exit {proc.returncode})")
        status_line = lines[0]
        if status_line == "unsat":
            return SolveResult("unsat")
        if status_line == "unknown":
            return SolveResult("unknown", reason="solver reported unknown")
        if status_line != "sat":
            raise SolverError(f"unparseable solver output: {status_line!r}")
        rest = "\n".join(lines[1:])
        model = parse_model(rest, formula)
        return SolveResult("sat", model=model)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
