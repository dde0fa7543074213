"""Semantic round-trip of emitted SMT-LIB2 scripts.

An independent width-tracking S-expression evaluator interprets every
assertion in the emitted script under the builtin solver's model; on sat
outcomes all assertions must hold. This keeps the script honest for
external solvers even when none is installed.
"""
import pytest

from conftest import run_symex
from minicpp_bmc.encode import ArrayVal, encode
from minicpp_bmc.smtlib import emit_smtlib, parse_sexprs, sanitize
from minicpp_bmc.solver import solve
from minicpp_bmc.exprs import smt_sdiv, smt_srem, to_unsigned, wrap


class BV:
    """Signed value with an explicit bit width."""

    def __init__(self, value: int, width: int):
        self.w = width
        self.v = wrap(value, width)

    def __eq__(self, other):
        return isinstance(other, BV) and self.w == other.w and self.v == other.v

    def __repr__(self):
        return f"bv{self.w}({self.v})"


class SexprEval:
    def __init__(self, width, consts):
        self.w = width
        self.env = dict(consts)

    def ev(self, node, bindings=None):
        b = bindings or {}
        out = self._ev(node, b)
        return out

    def _ev(self, node, b):
        if isinstance(node, str):
            if node in b:
                return b[node]
            if node == "true":
                return True
            if node == "false":
                return False
            if node.startswith("#x"):
                return BV(int(node[2:], 16), 4 * len(node) - 8)
            if node.startswith("#b"):
                return BV(int(node[2:], 2), len(node) - 2)
            for cand in (node, node.strip("|")):
                if cand in self.env:
                    v = self.env[cand]
                    if isinstance(v, bool) or isinstance(v, (ArrayVal, BV)):
                        return v
                    return BV(v, self.w)
            raise KeyError(node)
        head = node[0]
        if isinstance(head, list):
            if head[0] == "_" and head[1] == "sign_extend":
                a = self._ev(node[1], b)
                return BV(a.v, a.w + int(head[2]))
            if head[0] == "_" and head[1] == "zero_extend":
                a = self._ev(node[1], b)
                return BV(to_unsigned(a.v, a.w), a.w + int(head[2]))
            if head[0] == "_" and head[1] == "extract":
                hi, lo = int(head[2]), int(head[3])
                a = self._ev(node[1], b)
                return BV((to_unsigned(a.v, a.w) >> lo), hi - lo + 1)
            if head[:2] == ["as", "const"]:
                return ArrayVal(self._ev(node[1], b).v)
            raise AssertionError(head)
        if head == "_":
            return BV(int(node[1][2:]), int(node[2]))
        if head == "!":
            return self._ev(node[1], b)
        if head == "let":
            nb = dict(b)
            for name, val in node[1]:
                nb[name] = self._ev(val, b)
            return self._ev(node[2], nb)
        args = [self._ev(a, b) for a in node[1:]]
        if head in ("=", "distinct"):
            x, y = args
            if isinstance(x, ArrayVal) or isinstance(y, ArrayVal):
                same = x == y
            elif isinstance(x, bool) or isinstance(y, bool):
                same = bool(x) == bool(y)
            else:
                same = x == y
            return same if head == "=" else not same
        if head == "not":
            return not args[0]
        if head == "and":
            return all(args)
        if head == "or":
            return any(args)
        if head == "=>":
            return (not args[0]) or args[1]
        if head == "ite":
            return args[1] if args[0] else args[2]
        if head in ("bvadd", "bvsub", "bvmul", "bvneg"):
            w = args[0].w
            if head == "bvadd":
                return BV(sum(a.v for a in args), w)
            if head == "bvsub":
                return BV(args[0].v - args[1].v, w)
            if head == "bvneg":
                return BV(-args[0].v, w)
            out = 1
            for a in args:
                out *= a.v
            return BV(out, w)
        if head == "bvsdiv":
            return BV(smt_sdiv(args[0].v, args[1].v, args[0].w), args[0].w)
        if head == "bvsrem":
            return BV(smt_srem(args[0].v, args[1].v, args[0].w), args[0].w)
        if head == "bvslt":
            return args[0].v < args[1].v
        if head == "bvsle":
            return args[0].v <= args[1].v
        if head == "bvsgt":
            return args[0].v > args[1].v
        if head == "bvsge":
            return args[0].v >= args[1].v
        if head == "select":
            return BV(args[0].get(args[1].v), self.w)
        if head == "store":
            return args[0].set(args[1].v, args[2].v)
        raise AssertionError(f"unknown head {head}")


def _script_holds(script: str, model: dict, width: int) -> bool:
    nodes = parse_sexprs(script)
    consts = {}
    for name, v in model.items():
        if isinstance(v, ArrayVal) or isinstance(v, bool):
            consts[sanitize(name)] = v
        else:
            consts[sanitize(name)] = BV(v, width)
        consts[sanitize(name).strip("|")] = consts[sanitize(name)]
    ev = SexprEval(width, consts)
    ok = True
    for node in nodes:
        if not isinstance(node, list) or not node or node[0] != "assert":
            continue
        body = node[1]
        if isinstance(body, list) and body and body[0] == "!":
            body = body[1]
        if (
            isinstance(body, list)
            and body
            and body[0] == "="
            and isinstance(body[1], str)
            and body[1].startswith("p!")
        ):
            ev.env[body[1]] = bool(ev.ev(body[2]))
            continue
        ok = ok and bool(ev.ev(body))
    return ok


@pytest.mark.parametrize("source,expect_sat,flags", [
    ("int main(){ int x = nondet_int(); assert(x + 1 > x); return 0; }", True, {}),
    ("int main(){ int a = nondet_int(); int b = nondet_int(); if (a > 0) { if (b > a) { assert(b * 2 != 14); } } return 0; }", True, {}),
    ("int main(){ int x = nondet_int(); int e = x + x; assert(e % 2 == 0); return 0; }", False, {}),
    ("int main(){ int x = nondet_int(); int y = x * 3; return 0; }", True, {"overflow": True}),
    ("int main(){ int a[4]; int i = nondet_int(); if (i >= 0) { if (i < 4) { a[i] = 9; assert(a[i] == 9); } } return 0; }", False, {"bounds": True}),
])
def test_emitted_script_agrees_with_builtin_model(source, expect_sat, flags):
    _, ssa = run_symex(source, simplify=False, **flags)
    f = encode(ssa)
    script = emit_smtlib(f)
    res = solve(f, "builtin", timeout=120)
    assert (res.status == "sat") == expect_sat, res.status
    if res.status == "sat":
        assert _script_holds(script, res.model, 32)


def test_flagship_scripts_hold(friend18_source):
    _, ssa = run_symex(friend18_source, "friend18.cpp", simplify=False)
    f = encode(ssa)
    res = solve(f, "builtin")
    assert res.status == "sat"
    assert _script_holds(emit_smtlib(f), res.model, 32)
