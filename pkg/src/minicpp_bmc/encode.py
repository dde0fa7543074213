"""SSA system -> quantifier-free bit-vector/array formula.

The formula keeps the expression IR; rendering to SMT-LIB text and
bit-blasting to CNF are separate backends over the same structure.  A
reduced width (e.g. 8) is supported for exhaustive encoder checks on
pointer-free programs; the default machine width is 32.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import EncodeError
from .exprs import (
    Bin,
    Const,
    Expr,
    Ite,
    NoOverflow,
    PtrAdd,
    Select,
    Store,
    Sym,
    Un,
    ZeroArr,
    eval_binop,
    eval_unop,
    mk_not,
    mk_or,
    walk_syms,
    wrap,
)
from .symex import SsaSystem

_SUPPORTED_UNOPS = {"neg", "not", "objid", "objoff"}
_SUPPORTED_BINOPS = {
    "add",
    "sub",
    "mul",
    "div",
    "rem",
    "eq",
    "ne",
    "lt",
    "le",
    "gt",
    "ge",
    "and",
    "or",
}


@dataclass
class Formula:
    width: int
    decls: dict = field(default_factory=dict)  # symbol -> 'bv' | 'bool' | 'arr'
    constraints: list = field(default_factory=list)  # (name, Expr) named assertions
    prop_literals: list = field(default_factory=list)  # (name, Expr) p_i definitions
    properties: list = field(default_factory=list)  # Property, parallel to prop_literals
    ssa: SsaSystem | None = None
    array_defs: dict = field(default_factory=dict)  # array symbol -> defining Expr


def _sort_of(ty: str) -> str:
    if ty == "bool":
        return "bool"
    if ty == "arr":
        return "arr"
    return "bv"


def _check_ops(e: Expr) -> None:
    if isinstance(e, (Const, Sym, ZeroArr)):
        return
    if isinstance(e, Un):
        if e.op not in _SUPPORTED_UNOPS:
            raise EncodeError(None, f"unsupported unary operator '{e.op}'")
        _check_ops(e.a)
        return
    if isinstance(e, Bin):
        if e.op not in _SUPPORTED_BINOPS:
            raise EncodeError(None, f"unsupported binary operator '{e.op}'")
        _check_ops(e.a)
        _check_ops(e.b)
        return
    if isinstance(e, Ite):
        _check_ops(e.c)
        _check_ops(e.a)
        _check_ops(e.b)
        return
    if isinstance(e, PtrAdd):
        _check_ops(e.p)
        _check_ops(e.delta)
        return
    if isinstance(e, Select):
        _check_ops(e.arr)
        _check_ops(e.idx)
        return
    if isinstance(e, Store):
        _check_ops(e.arr)
        _check_ops(e.idx)
        _check_ops(e.val)
        return
    if isinstance(e, NoOverflow):
        _check_ops(e.a)
        if e.b is not None:
            _check_ops(e.b)
        return
    raise EncodeError(None, f"expression {type(e).__name__} outside the supported operator set")


def encode(ssa: SsaSystem, width: int = 32) -> Formula:
    """Encode equations and properties into named constraints and literals."""
    f = Formula(width=width, ssa=ssa)
    used: set[str] = set()

    def declare_from(e: Expr) -> None:
        syms: set[str] = set()
        walk_syms(e, syms)
        used.update(syms)

    n = 0
    for eq in ssa.equations:
        _check_ops(eq.guard)
        _check_ops(eq.rhs)
        lhs = Sym(eq.lhs, eq.ty)
        f.decls.setdefault(eq.lhs, _sort_of(eq.ty))
        declare_from(eq.guard)
        declare_from(eq.rhs)
        if eq.ty == "arr":
            f.array_defs[eq.lhs] = eq.rhs
        body = Bin("eq", lhs, eq.rhs)
        if not (isinstance(eq.guard, Const) and eq.guard.value):
            body = mk_or(mk_not(eq.guard), body)
        f.constraints.append((f"c{n}", body))
        n += 1
    # assumptions are already folded into the guards of later properties
    for i, prop in enumerate(ssa.properties):
        _check_ops(prop.guard)
        _check_ops(prop.claim)
        declare_from(prop.guard)
        declare_from(prop.claim)
        lit = mk_or(mk_not(prop.guard), prop.claim)
        f.prop_literals.append((f"p{i}", lit))
        f.properties.append(prop)
    for s in sorted(used):
        if s not in f.decls:
            f.decls[s] = _sort_of(ssa.sym_tys.get(s, "int"))
    if width != 32:
        for s, sort in f.decls.items():
            if ssa.sym_tys.get(s) == "ptr":
                raise EncodeError(None, "reduced width requires a pointer-free program")
    return f


# ---------------------------------------------------------------------------
# Independent evaluator: substitute a model and compute concrete values.
# Used for model validity checking and for identifying the violated literal.
# ---------------------------------------------------------------------------


class ArrayVal:
    """Concrete array value: default plus exceptional entries."""

    def __init__(self, default: int = 0, entries: dict | None = None):
        self.default = default
        self.entries = dict(entries or {})

    def get(self, idx: int) -> int:
        return self.entries.get(idx, self.default)

    def set(self, idx: int, v: int) -> "ArrayVal":
        out = ArrayVal(self.default, self.entries)
        out.entries[idx] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, ArrayVal):
            return NotImplemented
        if self.default != other.default:
            keys = set(self.entries) | set(other.entries)
            return False if not keys else all(self.get(k) == other.get(k) for k in keys)
        keys = set(self.entries) | set(other.entries)
        return all(self.get(k) == other.get(k) for k in keys)


class MissingSymbol(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)


def eval_with_model(e: Expr, model: dict, width: int = 32, strict: bool = False):
    """Evaluate an expression under a model; missing scalars default to 0
    (raise MissingSymbol when strict)."""

    def ev(x: Expr):
        if isinstance(x, Const):
            return wrap(x.value, width) if x.ty != "bool" else x.value
        if isinstance(x, Sym):
            if x.name in model:
                v = model[x.name]
                if isinstance(v, bool):
                    return int(v)
                return v
            if x.ty == "arr":
                if strict:
                    raise MissingSymbol(x.name)
                return ArrayVal(0)
            if strict:
                raise MissingSymbol(x.name)
            return 0
        if isinstance(x, ZeroArr):
            return ArrayVal(0)
        if isinstance(x, Un):
            return _ev_un(x.op, ev(x.a), width)
        if isinstance(x, Bin):
            return _ev_bin(x.op, ev(x.a), ev(x.b), width)
        if isinstance(x, Ite):
            return ev(x.a) if ev(x.c) else ev(x.b)
        if isinstance(x, PtrAdd):
            return wrap(ev(x.p) + ev(x.delta), width)
        if isinstance(x, Select):
            arr = ev(x.arr)
            return arr.get(ev(x.idx))
        if isinstance(x, Store):
            arr = ev(x.arr)
            return arr.set(ev(x.idx), ev(x.val))
        if isinstance(x, NoOverflow):
            a = ev(x.a)
            b = ev(x.b) if x.b is not None else None
            return _ev_no_overflow(x.op, a, b, width)
        raise EncodeError(None, f"cannot evaluate {type(x).__name__}")

    return ev(e)


def _ev_un(op: str, a, width: int):
    if op == "neg":
        return wrap(-a, width)
    if op == "not":
        return int(not a)
    if op == "objid":
        return eval_unop(op, a)
    if op == "objoff":
        return eval_unop(op, a)
    raise AssertionError(op)


def _ev_bin(op: str, a, b, width: int):
    if isinstance(a, ArrayVal) or isinstance(b, ArrayVal):
        assert op in ("eq", "ne")
        same = a == b
        return int(same) if op == "eq" else int(not same)
    if width == 32:
        return eval_binop(op, a, b)
    if op == "add":
        return wrap(a + b, width)
    if op == "sub":
        return wrap(a - b, width)
    if op == "mul":
        return wrap(a * b, width)
    if op == "div":
        from .exprs import smt_sdiv

        return smt_sdiv(a, b, width)
    if op == "rem":
        from .exprs import smt_srem

        return smt_srem(a, b, width)
    return eval_binop(op, a, b)


def _ev_no_overflow(op: str, a, b, width: int):
    lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    if op == "add":
        return int(lo <= a + b <= hi)
    if op == "sub":
        return int(lo <= a - b <= hi)
    if op == "mul":
        return int(lo <= a * b <= hi)
    if op == "div":
        return int(not (a == lo and b == -1))
    if op == "neg":
        return int(a != lo)
    raise AssertionError(op)


def check_model_validity(formula: Formula, model: dict) -> tuple[bool, list[str]]:
    """Every constraint must evaluate true under the model; returns
    (valid, skipped-constraint names for unresolvable array symbols)."""
    skipped: list[str] = []
    for name, e in formula.constraints:
        try:
            v = eval_with_model(e, model, formula.width, strict=True)
        except MissingSymbol as ms:
            if formula.ssa is not None and formula.ssa.sym_tys.get(ms.name) == "arr":
                skipped.append(name)
                continue
            v = eval_with_model(e, model, formula.width, strict=False)
        if not v:
            return False, skipped
    return True, skipped


def first_false_literal(formula: Formula, model: dict) -> int | None:
    """Index of the first property literal that is false under the model."""
    for i, (_, lit) in enumerate(formula.prop_literals):
        if not eval_with_model(lit, model, formula.width):
            return i
    return None
