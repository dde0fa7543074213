"""SMT-LIB2 script emission and model parsing (solver-agnostic backend)."""
from __future__ import annotations

from .diagnostics import SolverError
from .encode import ArrayVal, Formula
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
    to_unsigned,
)

_SIMPLE_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789~!@$%^&*_-+=<>.?/")


def sanitize(name: str) -> str:
    """Deterministic SMT-LIB symbol for an SSA name (`x#1` -> `x!1`)."""
    out = name.replace("#", "!").replace("::", ".")
    if all(c in _SIMPLE_CHARS for c in out) and out and not out[0].isdigit():
        return out
    quoted = out.replace("|", ".").replace("\\", ".")
    return f"|{quoted}|"


def _bv(value: int, width: int) -> str:
    return f"(_ bv{to_unsigned(value, width)} {width})"


class _Emitter:
    def __init__(self, formula: Formula):
        self.f = formula
        self.w = formula.width

    def sort(self, tag: str) -> str:
        if tag == "bool":
            return "Bool"
        if tag == "arr":
            return f"(Array (_ BitVec {self.w}) (_ BitVec {self.w}))"
        return f"(_ BitVec {self.w})"

    def term(self, e: Expr) -> str:
        w = self.w
        if isinstance(e, Const):
            if e.ty == "bool":
                return "true" if e.value else "false"
            return _bv(e.value, w)
        if isinstance(e, Sym):
            s = sanitize(e.name)
            if e.ty == "bool" and self.f.decls.get(e.name) == "bv":
                return f"(distinct {s} {_bv(0, w)})"
            return s
        if isinstance(e, ZeroArr):
            return f"((as const {self.sort('arr')}) {_bv(0, w)})"
        if isinstance(e, Un):
            a = self.term(e.a)
            if e.op == "neg":
                return f"(bvneg {a})"
            if e.op == "not":
                return f"(not {a})"
            if e.op == "objid":
                hi, lo = w - 1, w - 8
                return f"((_ zero_extend {w - 8}) ((_ extract {hi} {lo}) {a}))"
            if e.op == "objoff":
                return f"((_ zero_extend 8) ((_ extract {w - 9} 0) {a}))"
        if isinstance(e, Bin):
            a, b = self.term(e.a), self.term(e.b)
            table = {
                "add": "bvadd",
                "sub": "bvsub",
                "mul": "bvmul",
                "div": "bvsdiv",
                "rem": "bvsrem",
                "eq": "=",
                "lt": "bvslt",
                "le": "bvsle",
                "gt": "bvsgt",
                "ge": "bvsge",
                "and": "and",
                "or": "or",
            }
            if e.op == "ne":
                return f"(distinct {a} {b})"
            return f"({table[e.op]} {a} {b})"
        if isinstance(e, Ite):
            return f"(ite {self.term(e.c)} {self.term(e.a)} {self.term(e.b)})"
        if isinstance(e, PtrAdd):
            return f"(bvadd {self.term(e.p)} {self.term(e.delta)})"
        if isinstance(e, Select):
            sel = f"(select {self.term(e.arr)} {self.term(e.idx)})"
            if e.elem_ty == "bool":
                return f"(distinct {sel} {_bv(0, w)})"
            return sel
        if isinstance(e, Store):
            val = e.val
            v = self.term(val)
            if getattr(val, "ty", "int") == "bool":
                v = f"(ite {v} {_bv(1, w)} {_bv(0, w)})"
            return f"(store {self.term(e.arr)} {self.term(e.idx)} {v})"
        if isinstance(e, NoOverflow):
            return self.no_overflow(e)
        raise SolverError(f"cannot emit {type(e).__name__}")

    def no_overflow(self, e: NoOverflow) -> str:
        # width-extended arithmetic comparison
        w = self.w
        if e.op == "neg":
            return f"(distinct {self.term(e.a)} {_bv(-(1 << (w - 1)), w)})"
        if e.op == "div":
            a, b = self.term(e.a), self.term(e.b)
            return f"(not (and (= {a} {_bv(-(1 << (w - 1)), w)}) (= {b} {_bv(-1, w)})))"
        ext = w if e.op == "mul" else 1
        wide = w + ext
        a = f"((_ sign_extend {ext}) {self.term(e.a)})"
        b = f"((_ sign_extend {ext}) {self.term(e.b)})"
        op = {"add": "bvadd", "sub": "bvsub", "mul": "bvmul"}[e.op]
        lo = _bv(-(1 << (w - 1)), wide)
        hi = _bv((1 << (w - 1)) - 1, wide)
        return f"(let ((.r ({op} {a} {b}))) (and (bvsle {lo} .r) (bvsle .r {hi})))"


def emit_smtlib(formula: Formula, negate_props: list | None = None) -> str:
    """Render the formula as an SMT-LIB2 script.

    negate_props: indices of property literals to attack; None means all
    (the single-query strategy: sat(C and (not p0 or ... or not pn))).
    """
    em = _Emitter(formula)
    lines = ["(set-option :produce-models true)", "(set-logic QF_ABV)"]
    for name, tag in formula.decls.items():
        lines.append(f"(declare-const {sanitize(name)} {em.sort(tag)})")
    for i, _ in enumerate(formula.prop_literals):
        lines.append(f"(declare-const p!{i} Bool)")
    for name, e in formula.constraints:
        lines.append(f"(assert (! {em.term(e)} :named {name}))")
    for i, (_, lit) in enumerate(formula.prop_literals):
        lines.append(f"(assert (= p!{i} {em.term(lit)}))")
    targets = negate_props if negate_props is not None else list(range(len(formula.prop_literals)))
    if targets:
        if len(targets) == 1:
            lines.append(f"(assert (not p!{targets[0]}))")
        else:
            ors = " ".join(f"(not p!{i})" for i in targets)
            lines.append(f"(assert (or {ors}))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def symbol_map(formula: Formula) -> dict[str, str]:
    """sanitized name -> SSA name, for model parsing."""
    out = {}
    for name in formula.decls:
        s = sanitize(name)
        out[s.strip("|")] = name
        out[s] = name
    return out


# ---------------------------------------------------------------------------
# Model parsing
# ---------------------------------------------------------------------------


def _tokenize_sexp(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.index("|", i + 1)
            yield text[i : j + 1]
            i = j + 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n()|;":
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str):
    stack: list[list] = [[]]
    for tok in _tokenize_sexp(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0]


def _parse_value(node, width: int):
    if isinstance(node, str):
        if node == "true":
            return True
        if node == "false":
            return False
        if node.startswith("#x"):
            return _signed(int(node[2:], 16), width)
        if node.startswith("#b"):
            return _signed(int(node[2:], 2), width)
        if node.lstrip("-").isdigit():
            return _signed(int(node) % (1 << width), width)
        return None
    if isinstance(node, list):
        if len(node) == 3 and node[0] == "_" and isinstance(node[1], str) and node[1].startswith("bv"):
            return _signed(int(node[1][2:]), int(node[2]))
        if len(node) == 2 and isinstance(node[0], list) and node[0][:2] == ["as", "const"]:
            v = _parse_value(node[1], width)
            return ArrayVal(v if v is not None else 0)
        if len(node) == 4 and node[0] == "store":
            base = _parse_value(node[1], width)
            idx = _parse_value(node[2], width)
            val = _parse_value(node[3], width)
            if isinstance(base, ArrayVal) and idx is not None and val is not None:
                return base.set(idx, val)
            return None
        if len(node) == 2 and node[0] == "-":
            v = _parse_value(node[1], width)
            return -v if v is not None else None
    return None


def _signed(v: int, width: int) -> int:
    v &= (1 << width) - 1
    return v - (1 << width) if v >= (1 << (width - 1)) else v


def parse_model(text: str, formula: Formula) -> dict:
    """Extract symbol values from a solver's get-model output."""
    smap = symbol_map(formula)
    model: dict = {}
    try:
        nodes = parse_sexprs(text)
    except (ValueError, IndexError) as ex:
        raise SolverError(f"unparseable model output: {ex}")
    defs: list = []

    def collect(ns):
        for node in ns:
            if isinstance(node, list):
                if node and node[0] == "define-fun":
                    defs.append(node)
                else:
                    collect(node)

    collect(nodes)
    for node in defs:
        if len(node) < 5:
            continue
        raw_name = node[1]
        name = smap.get(raw_name) or smap.get(raw_name.strip("|"))
        if name is None:
            if raw_name.startswith("p!"):
                model[raw_name] = _parse_value(node[4], formula.width)
            continue
        v = _parse_value(node[4], formula.width)
        if v is not None:
            model[name] = v
    return model
