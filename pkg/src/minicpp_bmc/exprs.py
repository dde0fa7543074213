"""Flat expression IR used by the GOTO program, SSA system, and encoder.

Pointers are 32-bit values split 8/24 into (object id, slot offset);
arithmetic is 32-bit two's complement with SMT-LIB division semantics, so
the concrete interpreter, the constant folder, and the SMT encoding agree
bit-for-bit on every operation, including division by zero.
"""
from __future__ import annotations

from dataclasses import dataclass

PTR_OBJ_BITS = 8
PTR_OFF_BITS = 24
MAX_OBJECTS = (1 << PTR_OBJ_BITS) - 1

WORD = 32
MASK32 = (1 << 32) - 1
INT_MIN = -(1 << 31)
INT_MAX = (1 << 31) - 1


def wrap(v: int, width: int = 32) -> int:
    """Two's complement wrap to a signed value of the given width."""
    m = (1 << width) - 1
    half = 1 << (width - 1)
    v &= m
    return v - (1 << width) if v >= half else v


def to_unsigned(v: int, width: int = 32) -> int:
    return v & ((1 << width) - 1)


def smt_sdiv(a: int, b: int, width: int = 32) -> int:
    """Signed division with SMT-LIB bvsdiv semantics (incl. division by 0)."""
    if b == 0:
        return -1 if a >= 0 else 1
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap(q, width)


def smt_srem(a: int, b: int, width: int = 32) -> int:
    """Signed remainder with SMT-LIB bvsrem semantics (sign of dividend)."""
    if b == 0:
        return a
    r = abs(a) % abs(b)
    if a < 0:
        r = -r
    return wrap(r, width)


def encode_ptr(obj: int, off: int) -> int:
    assert 0 <= obj <= MAX_OBJECTS and 0 <= off < (1 << PTR_OFF_BITS), (obj, off)
    return wrap((obj << PTR_OFF_BITS) | off)


def ptr_obj(v: int) -> int:
    return (to_unsigned(v) >> PTR_OFF_BITS) & MAX_OBJECTS


def ptr_off(v: int) -> int:
    return to_unsigned(v) & ((1 << PTR_OFF_BITS) - 1)


# ---------------------------------------------------------------------------
# Nodes.  ty in {'int', 'bool', 'ptr', 'arr'}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Const(Expr):
    value: int
    ty: str = "int"
    label: str = ""  # rendering hint, e.g. a vtable name for tag constants


@dataclass(frozen=True)
class Sym(Expr):
    name: str
    ty: str = "int"


@dataclass(frozen=True)
class AddrVar(Expr):
    """Address of a named object (global or object-local); resolved at symex."""

    var: str
    ty: str = "ptr"


@dataclass(frozen=True)
class Un(Expr):
    op: str  # 'neg' | 'not' | 'objid' | 'objoff'
    a: Expr

    @property
    def ty(self) -> str:
        return "bool" if self.op == "not" else "int"


_BOOL_OPS = frozenset({"eq", "ne", "lt", "le", "gt", "ge", "and", "or"})


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # add sub mul div rem eq ne lt le gt ge and or
    a: Expr
    b: Expr

    @property
    def ty(self) -> str:
        return "bool" if self.op in _BOOL_OPS else "int"


@dataclass(frozen=True)
class Ite(Expr):
    c: Expr
    a: Expr
    b: Expr

    @property
    def ty(self) -> str:
        return expr_ty(self.a)


@dataclass(frozen=True)
class PtrAdd(Expr):
    p: Expr
    delta: Expr
    ty: str = "ptr"
    cast_label: str = ""  # rendering hint: "(Penguin*)" for this-adjustments


@dataclass(frozen=True)
class ZeroArr(Expr):
    """Array with every cell zero (initial contents of array objects)."""

    ty: str = "arr"


@dataclass(frozen=True)
class Select(Expr):
    arr: Expr
    idx: Expr
    elem_ty: str = "int"

    @property
    def ty(self) -> str:
        return self.elem_ty


@dataclass(frozen=True)
class Store(Expr):
    arr: Expr
    idx: Expr
    val: Expr
    ty: str = "arr"


@dataclass(frozen=True)
class NoOverflow(Expr):
    """Claim that a 32-bit signed arithmetic op does not overflow."""

    op: str  # add sub mul div neg
    a: Expr
    b: Expr | None = None
    ty: str = "bool"


TRUE = Const(1, "bool")
FALSE = Const(0, "bool")
NULLPTR = Const(0, "ptr")


def expr_ty(e: Expr) -> str:
    return e.ty


def mk_not(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(0 if e.value else 1, "bool")
    if isinstance(e, Un) and e.op == "not":
        return e.a
    return Un("not", e)


def mk_and(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const):
        return b if a.value else FALSE
    if isinstance(b, Const):
        return a if b.value else FALSE
    if a == b:
        return a
    return Bin("and", a, b)


def mk_or(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const):
        return TRUE if a.value else b
    if isinstance(b, Const):
        return TRUE if b.value else a
    if a == b:
        return a
    return Bin("or", a, b)


def mk_ite(c: Expr, a: Expr, b: Expr) -> Expr:
    if isinstance(c, Const):
        return a if c.value else b
    if a == b:
        return a
    return Ite(c, a, b)


def mk_eq(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return TRUE if a.value == b.value else FALSE
    if a == b:
        return TRUE
    return Bin("eq", a, b)


# ---------------------------------------------------------------------------
# Concrete operator semantics (shared by folder, interpreter, evaluator)
# ---------------------------------------------------------------------------


def eval_binop(op: str, a: int, b: int) -> int:
    if op == "add":
        return wrap(a + b)
    if op == "sub":
        return wrap(a - b)
    if op == "mul":
        return wrap(a * b)
    if op == "div":
        return smt_sdiv(a, b)
    if op == "rem":
        return smt_srem(a, b)
    if op == "eq":
        return int(a == b)
    if op == "ne":
        return int(a != b)
    if op == "lt":
        return int(a < b)
    if op == "le":
        return int(a <= b)
    if op == "gt":
        return int(a > b)
    if op == "ge":
        return int(a >= b)
    if op == "and":
        return int(bool(a) and bool(b))
    if op == "or":
        return int(bool(a) or bool(b))
    raise AssertionError(op)


def eval_no_overflow(op: str, a: int, b: int | None) -> int:
    if op == "add":
        return int(INT_MIN <= a + b <= INT_MAX)
    if op == "sub":
        return int(INT_MIN <= a - b <= INT_MAX)
    if op == "mul":
        return int(INT_MIN <= a * b <= INT_MAX)
    if op == "div":
        # division by zero is a separate claim; only INT_MIN / -1 overflows
        return int(not (a == INT_MIN and b == -1))
    if op == "neg":
        return int(a != INT_MIN)
    raise AssertionError(op)


def eval_unop(op: str, a: int) -> int:
    if op == "neg":
        return wrap(-a)
    if op == "not":
        return int(not a)
    if op == "objid":
        return ptr_obj(a)
    if op == "objoff":
        return ptr_off(a)
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# Folding
# ---------------------------------------------------------------------------


def fold(e: Expr, defs: dict | None = None, _memo: dict | None = None) -> Expr:
    """Constant-fold; when `defs` maps symbol names to exprs, resolve through
    them (used by symex to evaluate vptr tags and guards)."""
    memo = _memo if _memo is not None else {}
    key = id(e)
    if key in memo:
        return memo[key]
    out = _fold(e, defs, memo)
    memo[key] = out
    return out


def _fold(e: Expr, defs, memo) -> Expr:
    if isinstance(e, Const) or isinstance(e, ZeroArr) or isinstance(e, AddrVar):
        return e
    if isinstance(e, Sym):
        if defs is not None and e.name in defs and defs[e.name] is not None:
            resolved = fold(defs[e.name], defs, memo)
            if isinstance(resolved, Const):
                return resolved
        return e
    if isinstance(e, Un):
        a = fold(e.a, defs, memo)
        if isinstance(a, Const):
            return Const(eval_unop(e.op, a.value), e.ty)
        if e.op == "not":
            return mk_not(a)
        return Un(e.op, a)
    if isinstance(e, Bin):
        a = fold(e.a, defs, memo)
        b = fold(e.b, defs, memo)
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(eval_binop(e.op, a.value, b.value), e.ty)
        if e.op == "and":
            return mk_and(a, b)
        if e.op == "or":
            return mk_or(a, b)
        if e.op == "eq":
            return mk_eq(a, b)
        if e.op == "add" and isinstance(b, Const) and b.value == 0:
            return a
        if e.op == "add" and isinstance(a, Const) and a.value == 0:
            return b
        if e.op in ("sub",) and isinstance(b, Const) and b.value == 0:
            return a
        if e.op == "mul" and isinstance(b, Const) and b.value == 1:
            return a
        if e.op == "mul" and isinstance(a, Const) and a.value == 1:
            return b
        return Bin(e.op, a, b)
    if isinstance(e, Ite):
        c = fold(e.c, defs, memo)
        if isinstance(c, Const):
            return fold(e.a if c.value else e.b, defs, memo)
        a = fold(e.a, defs, memo)
        b = fold(e.b, defs, memo)
        return mk_ite(c, a, b)
    if isinstance(e, PtrAdd):
        p = fold(e.p, defs, memo)
        d = fold(e.delta, defs, memo)
        if isinstance(d, Const) and d.value == 0:
            return p
        if isinstance(p, Const) and isinstance(d, Const):
            return Const(wrap(p.value + d.value), "ptr")
        return PtrAdd(p, d)
    if isinstance(e, Select):
        arr = fold(e.arr, defs, memo)
        idx = fold(e.idx, defs, memo)
        return _fold_select(arr, idx, e.elem_ty, defs, memo)
    if isinstance(e, Store):
        return Store(fold(e.arr, defs, memo), fold(e.idx, defs, memo), fold(e.val, defs, memo))
    if isinstance(e, NoOverflow):
        a = fold(e.a, defs, memo)
        b = fold(e.b, defs, memo) if e.b is not None else None
        if isinstance(a, Const) and (b is None or isinstance(b, Const)):
            return Const(eval_no_overflow(e.op, a.value, b.value if b is not None else None), "bool")
        return NoOverflow(e.op, a, b)
    raise AssertionError(type(e).__name__)


def _fold_select(arr: Expr, idx: Expr, elem_ty: str, defs, memo) -> Expr:
    if isinstance(arr, ZeroArr):
        return Const(0, elem_ty)
    if isinstance(arr, Sym) and defs is not None and defs.get(arr.name) is not None:
        resolved = _fold_select(defs[arr.name], idx, elem_ty, defs, memo)
        if isinstance(resolved, Const):
            return resolved
        return Select(arr, idx, elem_ty)
    if isinstance(arr, Store):
        if isinstance(idx, Const) and isinstance(arr.idx, Const):
            if idx.value == arr.idx.value:
                return fold(arr.val, defs, memo)
            return _fold_select(fold(arr.arr, defs, memo), idx, elem_ty, defs, memo)
        if idx == arr.idx:
            return fold(arr.val, defs, memo)
        return Select(arr, idx, elem_ty)
    if isinstance(arr, Ite):
        return mk_ite(
            arr.c,
            _fold_select(arr.a, idx, elem_ty, defs, memo),
            _fold_select(arr.b, idx, elem_ty, defs, memo),
        )
    return Select(arr, idx, elem_ty)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_OP_TEXT = {
    "add": "+",
    "sub": "-",
    "mul": "*",
    "div": "/",
    "rem": "%",
    "eq": "==",
    "ne": "!=",
    "lt": "<",
    "le": "<=",
    "gt": ">",
    "ge": ">=",
    "and": "&&",
    "or": "||",
}


def render(e: Expr) -> str:
    if isinstance(e, Const):
        if e.label:
            return f"&{e.label}"
        if e.ty == "bool":
            return "true" if e.value else "false"
        if e.ty == "ptr":
            if e.value == 0:
                return "NULL"
            return f"&obj{ptr_obj(e.value)}[{ptr_off(e.value)}]"
        return str(e.value)
    if isinstance(e, Sym):
        return e.name.rsplit("::", 1)[-1]
    if isinstance(e, AddrVar):
        return f"&{e.var.rsplit('::', 1)[-1]}"
    if isinstance(e, Un):
        if e.op == "neg":
            return f"-{_paren(e.a)}"
        if e.op == "not":
            return f"!{_paren(e.a)}"
        return f"{e.op}({render(e.a)})"
    if isinstance(e, Bin):
        return f"{_paren(e.a)} {_OP_TEXT[e.op]} {_paren(e.b)}"
    if isinstance(e, Ite):
        return f"({render(e.c)} ? {render(e.a)} : {render(e.b)})"
    if isinstance(e, PtrAdd):
        if e.cast_label:
            return f"{e.cast_label}{_paren(e.p)}"
        return f"{_paren(e.p)} +p {_paren(e.delta)}"
    if isinstance(e, ZeroArr):
        return "ZERO_ARRAY"
    if isinstance(e, Select):
        return f"{_paren(e.arr)}[{render(e.idx)}]"
    if isinstance(e, Store):
        return f"store({render(e.arr)}, {render(e.idx)}, {render(e.val)})"
    if isinstance(e, NoOverflow):
        if e.b is None:
            return f"!overflow({e.op}, {render(e.a)})"
        return f"!overflow({e.op}, {render(e.a)}, {render(e.b)})"
    raise AssertionError(type(e).__name__)


def _paren(e: Expr) -> str:
    s = render(e)
    if isinstance(e, (Bin, Ite, PtrAdd)):
        return f"({s})"
    return s


def walk_syms(e: Expr, out: set) -> None:
    if isinstance(e, Sym):
        out.add(e.name)
    elif isinstance(e, Un):
        walk_syms(e.a, out)
    elif isinstance(e, Bin):
        walk_syms(e.a, out)
        walk_syms(e.b, out)
    elif isinstance(e, Ite):
        walk_syms(e.c, out)
        walk_syms(e.a, out)
        walk_syms(e.b, out)
    elif isinstance(e, PtrAdd):
        walk_syms(e.p, out)
        walk_syms(e.delta, out)
    elif isinstance(e, Select):
        walk_syms(e.arr, out)
        walk_syms(e.idx, out)
    elif isinstance(e, Store):
        walk_syms(e.arr, out)
        walk_syms(e.idx, out)
        walk_syms(e.val, out)
    elif isinstance(e, NoOverflow):
        walk_syms(e.a, out)
        if e.b is not None:
            walk_syms(e.b, out)
