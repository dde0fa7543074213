"""Verdicts, counterexample traces, and trace reconstruction from models."""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import ReconstructError
from .encode import Formula, eval_with_model, first_false_literal
from .symex import Property, SsaSystem


@dataclass
class TraceStep:
    loc: object
    symbol: str
    value: int


@dataclass
class CounterexampleTrace:
    steps: list = field(default_factory=list)
    property: Property | None = None
    nondet_values: list = field(default_factory=list)  # (symbol, value), execution order

    def replay_values(self) -> list[int]:
        return [v for _, v in self.nondet_values]


@dataclass
class Verdict:
    status: str  # 'SUCCESSFUL' | 'FAILED' | 'UNKNOWN'
    reason: str = ""
    violated: Property | None = None
    trace: CounterexampleTrace | None = None

    def __post_init__(self) -> None:
        if self.status == "FAILED":
            assert self.violated is not None
        if self.status == "SUCCESSFUL":
            assert self.violated is None


def reconstruct(model: dict, ssa: SsaSystem, formula: Formula, violated_index: int | None = None) -> CounterexampleTrace:
    """Build the witness trace from a sat model.

    Steps follow equation order, restricted to equations whose guard holds
    under the model; missing symbols default to 0 (flagged by evaluator).
    """
    if violated_index is None:
        violated_index = first_false_literal(formula, model)
    if violated_index is None:
        raise ReconstructError("sat model but no property literal is false")
    prop = formula.properties[violated_index]
    trace = CounterexampleTrace(property=prop)
    for eq in ssa.equations:
        if eq.ty == "arr":
            continue
        g = eval_with_model(eq.guard, model, formula.width)
        if not g:
            continue
        v = model.get(eq.lhs)
        if v is None:
            v = eval_with_model(eq.rhs, model, formula.width)
        if isinstance(v, bool):
            v = int(v)
        if not isinstance(v, int):
            continue
        trace.steps.append(TraceStep(eq.loc, eq.lhs, v))
    for rec in ssa.nondets:
        g = eval_with_model(rec.guard, model, formula.width)
        if not g:
            continue
        v = model.get(rec.name, 0)
        if isinstance(v, bool):
            v = int(v)
        trace.nondet_values.append((rec.name, v))
    return trace
