"""Tseitin bit-blasting of formulas to CNF for the built-in solver.

Arrays are compiled away first: every array symbol is definitional (a
store/ite chain rooted at the all-zero array), so selects push down to
scalar ite chains and no array theory reaches the SAT core.
"""
from __future__ import annotations

from .diagnostics import SolverError
from .encode import Formula
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
    mk_ite,
    to_unsigned,
)
from .sat import CnfBuilder


class Blaster:
    def __init__(self, formula: Formula):
        self.f = formula
        self.w = formula.width
        self.b = CnfBuilder()
        self.sym_bits: dict[str, list[int]] = {}
        self.sym_bool: dict[str, int] = {}
        self._bool_memo: dict[int, int] = {}
        self._bv_memo: dict[int, list[int]] = {}
        self._keep: list[Expr] = []
        self._wide_memo: dict[tuple[int, int], list[int]] = {}
        self._div_memo: dict[tuple[int, int], tuple[list[int], list[int]]] = {}

    # -- array elimination ----------------------------------------------------

    def deark(self, e: Expr) -> Expr:
        if isinstance(e, Select):
            return self.push_select(self.deark(e.arr), self.deark(e.idx), e.elem_ty)
        if isinstance(e, (Const, Sym, ZeroArr)):
            return e
        if isinstance(e, Un):
            return Un(e.op, self.deark(e.a))
        if isinstance(e, Bin):
            return Bin(e.op, self.deark(e.a), self.deark(e.b))
        if isinstance(e, Ite):
            return Ite(self.deark(e.c), self.deark(e.a), self.deark(e.b))
        if isinstance(e, PtrAdd):
            return PtrAdd(self.deark(e.p), self.deark(e.delta))
        if isinstance(e, NoOverflow):
            return NoOverflow(e.op, self.deark(e.a), self.deark(e.b) if e.b is not None else None)
        if isinstance(e, Store):
            return Store(self.deark(e.arr), self.deark(e.idx), self.deark(e.val))
        raise SolverError(f"cannot eliminate arrays from {type(e).__name__}")

    def push_select(self, arr: Expr, idx: Expr, elem_ty: str) -> Expr:
        if isinstance(arr, ZeroArr):
            return Const(0, elem_ty)
        if isinstance(arr, Sym):
            d = self.f.array_defs.get(arr.name)
            if d is None:
                raise SolverError(f"free array symbol '{arr.name}' in builtin solver")
            return self.push_select(self.deark(d), idx, elem_ty)
        if isinstance(arr, Store):
            hit = self.push_select(arr.arr, idx, elem_ty)
            val = arr.val
            if getattr(val, "ty", "int") == "bool" and elem_ty != "bool":
                val = Ite(val, Const(1), Const(0))
            if elem_ty == "bool" and getattr(val, "ty", "int") != "bool":
                val = Bin("ne", val, Const(0))
            return mk_ite(Bin("eq", idx, arr.idx), val, hit)
        if isinstance(arr, Ite):
            return mk_ite(arr.c, self.push_select(arr.a, idx, elem_ty), self.push_select(arr.b, idx, elem_ty))
        raise SolverError(f"unsupported array expression {type(arr).__name__}")

    # -- bit vectors -------------------------------------------------------------

    def const_bits(self, value: int) -> list[int]:
        t = self.b.const_true()
        u = to_unsigned(value, self.w)
        return [t if (u >> i) & 1 else -t for i in range(self.w)]

    def sym_bv(self, name: str) -> list[int]:
        if name not in self.sym_bits:
            self.sym_bits[name] = [self.b.new_var() for _ in range(self.w)]
        return self.sym_bits[name]

    def bv(self, e: Expr) -> list[int]:
        key = id(e)
        if key in self._bv_memo:
            return self._bv_memo[key]
        self._keep.append(e)
        out = self._bv(e)
        assert len(out) == self.w
        self._bv_memo[key] = out
        return out

    def _bv(self, e: Expr) -> list[int]:
        w = self.w
        b = self.b
        if isinstance(e, Const):
            if e.ty == "bool":
                t = self.bool(e)
                return [t] + [-b.const_true()] * (w - 1)
            return self.const_bits(e.value)
        if isinstance(e, Sym):
            if e.ty == "bool" or self.f.decls.get(e.name) == "bool":
                t = self.bool(e)
                return [t] + [-b.const_true()] * (w - 1)
            return self.sym_bv(e.name)
        if isinstance(e, Un):
            if e.op == "neg":
                return self.negate(self.bv(e.a))
            if e.op == "objid":
                bits = self.bv(e.a)
                lo = w - 8
                return bits[lo:] + [-b.const_true()] * lo
            if e.op == "objoff":
                bits = self.bv(e.a)
                return bits[: w - 8] + [-b.const_true()] * 8
            # bool in bv context
            t = self.bool(e)
            return [t] + [-b.const_true()] * (w - 1)
        if isinstance(e, Bin):
            if e.op in ("add", "sub", "mul", "div", "rem"):
                a, bb = self.bv(e.a), self.bv(e.b)
                if e.op == "add":
                    return self.adder(a, bb)[0]
                if e.op == "sub":
                    return self.adder(a, [-x for x in bb], cin=b.const_true())[0]
                if e.op == "mul":
                    return self.wide_multiplier(a, bb)[:w]
                q, r = self.divider(e)
                return q if e.op == "div" else r
            t = self.bool(e)
            return [t] + [-b.const_true()] * (w - 1)
        if isinstance(e, Ite):
            c = self.bool(e.c)
            a, bb = self.bv(e.a), self.bv(e.b)
            return [b.gate_ite(c, x, y) for x, y in zip(a, bb)]
        if isinstance(e, PtrAdd):
            return self.adder(self.bv(e.p), self.bv(e.delta))[0]
        if isinstance(e, NoOverflow):
            t = self.bool(e)
            return [t] + [-b.const_true()] * (w - 1)
        raise SolverError(f"cannot blast {type(e).__name__} as bit-vector")

    def negate(self, a: list[int]) -> list[int]:
        return self.adder([-x for x in a], self.const_bits(0), cin=self.b.const_true())[0]

    def adder(self, a: list[int], bb: list[int], cin: int | None = None) -> tuple[list[int], int]:
        b = self.b
        carry = cin if cin is not None else -b.const_true()
        out = []
        for x, y in zip(a, bb):
            s, carry = b.gate_full_adder(x, y, carry)
            out.append(s)
        return out, carry

    def multiplier(self, a: list[int], bb: list[int], out_w: int) -> list[int]:
        b = self.b
        f = -b.const_true()
        acc = [f] * out_w
        for i in range(out_w):
            row = [f] * i + [b.gate_and([a[j], bb[i]]) for j in range(out_w - i)]
            acc, _ = self.adder(acc, row[:out_w])
        return acc

    def wide_multiplier(self, a: list[int], bb: list[int]) -> list[int]:
        # signed (2w)-bit product via sign extension; shared per operand pair
        key = (id(a), id(bb))
        if key in self._wide_memo:
            return self._wide_memo[key]
        out = self._wide_multiplier(a, bb)
        self._wide_memo[key] = out
        return out

    def _wide_multiplier(self, a: list[int], bb: list[int]) -> list[int]:
        w2 = 2 * self.w
        ae = a + [a[-1]] * self.w
        be = bb + [bb[-1]] * self.w
        b = self.b
        f = -b.const_true()
        acc = [f] * w2
        for i in range(w2):
            row = [f] * i + [b.gate_and([ae[j], be[i]]) for j in range(w2 - i)]
            carry = f
            new = []
            for x, y in zip(acc, row[:w2]):
                s, carry = b.gate_full_adder(x, y, carry)
                new.append(s)
            acc = new
        return acc

    def divider(self, e: Bin) -> tuple[list[int], list[int]]:
        """bvsdiv/bvsrem with SMT-LIB division-by-zero semantics."""
        b = self.b
        w = self.w
        a_bits, b_bits = self.bv(e.a), self.bv(e.b)
        key = (id(a_bits), id(b_bits))
        if key in self._div_memo:
            return self._div_memo[key]
        sa, sb = a_bits[-1], b_bits[-1]
        ua = self.mux_bv(sa, self.negate(a_bits), a_bits)
        ub = self.mux_bv(sb, self.negate(b_bits), b_bits)
        # restoring division, unsigned
        f = -b.const_true()
        rem = [f] * w
        q = [f] * w
        for i in range(w - 1, -1, -1):
            rem = [ua[i]] + rem[:-1]
            ge = self.uge(rem, ub)
            diff, _ = self.adder(rem, [-x for x in ub], cin=b.const_true())
            rem = self.mux_bv(ge, diff, rem)
            q[i] = ge
        sign_differs = b.gate_xor(sa, sb)
        sdiv = self.mux_bv(sign_differs, self.negate(q), q)
        srem = self.mux_bv(sa, self.negate(rem), rem)
        # division by zero: bvsdiv -> -1 if a >= 0 else 1; bvsrem -> a
        bz = self.is_zero(b_bits)
        minus1 = self.const_bits(-1)
        plus1 = self.const_bits(1)
        div_bz = self.mux_bv(sa, plus1, minus1)
        sdiv = self.mux_bv(bz, div_bz, sdiv)
        srem = self.mux_bv(bz, a_bits, srem)
        self._div_memo[key] = (sdiv, srem)
        return sdiv, srem

    def mux_bv(self, c: int, a: list[int], bb: list[int]) -> list[int]:
        return [self.b.gate_ite(c, x, y) for x, y in zip(a, bb)]

    def is_zero(self, a: list[int]) -> int:
        return self.b.gate_and([-x for x in a])

    def uge(self, a: list[int], bb: list[int]) -> int:
        # unsigned a >= b  <=>  no borrow in a - b
        _, carry = self.adder(a, [-x for x in bb], cin=self.b.const_true())
        return carry

    def ult(self, a: list[int], bb: list[int]) -> int:
        return -self.uge(a, bb)

    def slt(self, a: list[int], bb: list[int]) -> int:
        b = self.b
        sa, sb = a[-1], bb[-1]
        both = b.gate_iff(sa, sb)
        return b.gate_or([b.gate_and([sa, -sb]), b.gate_and([both, self.ult(a, bb)])])

    # -- booleans --------------------------------------------------------------------

    def sym_b(self, name: str) -> int:
        if name not in self.sym_bool:
            self.sym_bool[name] = self.b.new_var()
        return self.sym_bool[name]

    def bool(self, e: Expr) -> int:
        key = id(e)
        if key in self._bool_memo:
            return self._bool_memo[key]
        self._keep.append(e)
        out = self._bool(e)
        self._bool_memo[key] = out
        return out

    def _bool(self, e: Expr) -> int:
        b = self.b
        if isinstance(e, Const):
            t = b.const_true()
            return t if e.value else -t
        if isinstance(e, Sym):
            if e.ty == "bool" or self.f.decls.get(e.name) == "bool":
                return self.sym_b(e.name)
            bits = self.bv(e)
            return b.gate_or(bits)
        if isinstance(e, Un):
            if e.op == "not":
                return -self.bool(e.a)
            bits = self.bv(e)
            return b.gate_or(bits)
        if isinstance(e, Ite):
            return b.gate_ite(self.bool(e.c), self.bool(e.a), self.bool(e.b))
        if isinstance(e, NoOverflow):
            return self.no_overflow(e)
        if isinstance(e, Bin):
            if e.op == "and":
                return b.gate_and([self.bool(e.a), self.bool(e.b)])
            if e.op == "or":
                return b.gate_or([self.bool(e.a), self.bool(e.b)])
            if e.op in ("eq", "ne"):
                if _is_boolish(e.a, self.f) or _is_boolish(e.b, self.f):
                    r = b.gate_iff(self.bool(e.a), self.bool(e.b))
                else:
                    av, bv = self.bv(e.a), self.bv(e.b)
                    r = b.gate_and([b.gate_iff(x, y) for x, y in zip(av, bv)])
                return r if e.op == "eq" else -r
            av, bv = self.bv(e.a), self.bv(e.b)
            if e.op == "lt":
                return self.slt(av, bv)
            if e.op == "gt":
                return self.slt(bv, av)
            if e.op == "le":
                return -self.slt(bv, av)
            if e.op == "ge":
                return -self.slt(av, bv)
        raise SolverError(f"cannot blast {type(e).__name__} as boolean")

    def no_overflow(self, e: NoOverflow) -> int:
        b = self.b
        w = self.w
        if e.op == "neg":
            bits = self.bv(e.a)
            int_min = b.gate_and([bits[-1]] + [-x for x in bits[:-1]])
            return -int_min
        if e.op == "div":
            a_bits, b_bits = self.bv(e.a), self.bv(e.b)
            a_min = b.gate_and([a_bits[-1]] + [-x for x in a_bits[:-1]])
            b_m1 = b.gate_and(b_bits)
            return -b.gate_and([a_min, b_m1])
        a_bits, b_bits = self.bv(e.a), self.bv(e.b)
        if e.op == "add":
            s, _ = self.adder(a_bits, b_bits)
            ovf = b.gate_and([b.gate_iff(a_bits[-1], b_bits[-1]), -b.gate_iff(s[-1], a_bits[-1])])
            return -ovf
        if e.op == "sub":
            s, _ = self.adder(a_bits, [-x for x in b_bits], cin=b.const_true())
            ovf = b.gate_and([-b.gate_iff(a_bits[-1], b_bits[-1]), -b.gate_iff(s[-1], a_bits[-1])])
            return -ovf
        assert e.op == "mul"
        prod = self.wide_multiplier(a_bits, b_bits)
        sign = prod[w - 1]
        ok = b.gate_and([b.gate_iff(x, sign) for x in prod[w:]])
        return ok


def _is_boolish(e: Expr, formula: Formula) -> bool:
    ty = getattr(e, "ty", None)
    if ty == "bool":
        return True
    if isinstance(e, Sym):
        return formula.decls.get(e.name) == "bool"
    return False


def blast(formula: Formula, negate_props: list | None = None) -> tuple[Blaster, list[int]]:
    """Blast constraints and property literals; returns the blaster and the
    property literal SAT vars (asserting the query is the caller's job)."""
    bl = Blaster(formula)
    for name, e in formula.constraints:
        if _is_array_def(e):
            continue  # definitional; selects inline through array_defs
        lit = bl.bool(bl.deark(e))
        bl.b.add([lit])
    prop_vars = []
    for name, e in formula.prop_literals:
        lit = bl.bool(bl.deark(e))
        prop_vars.append(lit)
    targets = negate_props if negate_props is not None else list(range(len(prop_vars)))
    if targets:
        bl.b.add([-prop_vars[i] for i in targets])
    return bl, prop_vars


def _is_array_def(e: Expr) -> bool:
    t = e
    if isinstance(t, Bin) and t.op == "eq" and isinstance(t.a, Sym) and t.a.ty == "arr":
        return True
    # guarded array equation: (or (not g) (= arr rhs))
    if isinstance(t, Bin) and t.op == "or" and isinstance(t.b, Bin) and t.b.op == "eq":
        if isinstance(t.b.a, Sym) and t.b.a.ty == "arr":
            return True
    return False
