import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import run_symex
from minicpp_bmc.diagnostics import NO_LOC, ReconstructError
from minicpp_bmc.encode import (
    check_model_validity,
    encode,
    eval_with_model,
    first_false_literal,
)
from minicpp_bmc.exprs import Bin, Const, NoOverflow, Sym
from minicpp_bmc.results import reconstruct
from minicpp_bmc.smtlib import emit_smtlib, parse_model, sanitize
from minicpp_bmc.solver import solve
from minicpp_bmc.symex import Equation, Property, SsaSystem


def tiny_system():
    ssa = SsaSystem()
    ssa.sym_tys = {"x#1": "int"}
    ssa.equations = [Equation(Const(1, "bool"), "x#1", Const(1), "int", NO_LOC)]
    ssa.properties = [
        Property(Const(1, "bool"), Bin("eq", Sym("x#1"), Const(2)), "assertion", "x==2", NO_LOC, "main")
    ]
    return ssa


def test_trivial_system_sat_with_model():
    ssa = tiny_system()
    f = encode(ssa)
    res = solve(f, "builtin")
    assert res.status == "sat"
    assert res.model["x#1"] == 1
    ok, skipped = check_model_validity(f, res.model)
    assert ok and not skipped
    assert first_false_literal(f, res.model) == 0


def test_smtlib_script_shape():
    f = encode(tiny_system())
    script = emit_smtlib(f)
    assert "(set-logic QF_ABV)" in script
    assert "(set-option :produce-models true)" in script
    assert script.count("(check-sat)") == 1
    assert "(get-model)" in script
    assert "(assert (! " in script  # named constraints
    assert "x!1" in script  # deterministic symbol renaming


def test_sanitize_deterministic():
    assert sanitize("x#1") == "x!1"
    assert sanitize("main::x#2") == "main.x!2"
    s = sanitize("thunk::Penguin::doit(Bird*)::this#1")
    assert s.startswith("|") and s.endswith("|")


def test_model_parsing_formats():
    f = encode(tiny_system())
    m1 = parse_model("(model (define-fun x!1 () (_ BitVec 32) #x0000002a))", f)
    assert m1["x#1"] == 42
    m2 = parse_model("((define-fun x!1 () (_ BitVec 32) #b101))", f)
    assert m2["x#1"] == 5
    m3 = parse_model("(model (define-fun x!1 () (_ BitVec 32) (_ bv7 32)))", f)
    assert m3["x#1"] == 7
    neg = parse_model("(model (define-fun x!1 () (_ BitVec 32) #xffffffff))", f)
    assert neg["x#1"] == -1


def test_bird_penguin_system_unsat(bird_source):
    _, ssa = run_symex(bird_source, "bird.cpp")
    assert solve(encode(ssa), "builtin").status == "unsat"


def test_friend18_model_and_trace(friend18_source):
    _, ssa = run_symex(friend18_source, "friend18.cpp")
    f = encode(ssa)
    res = solve(f, "builtin")
    assert res.status == "sat"
    trace = reconstruct(res.model, ssa, f)
    assert trace.property.loc.line == 13
    assert trace.property.loc.column == 3
    assert trace.property.function == "main"
    assert trace.property.description == "foo<5678>(bring)!=12345678"
    rv = [s for s in trace.steps if s.symbol.endswith("return_value#1")]
    assert rv and rv[0].value == 12345678
    ok, _ = check_model_validity(f, res.model)
    assert ok


def test_reconstruct_requires_false_literal():
    ssa = tiny_system()
    f = encode(ssa)
    with pytest.raises(ReconstructError):
        reconstruct({"x#1": 2}, ssa, f)  # claim x==2 holds, nothing violated


def test_trace_ordered_by_equation_index(friend18_source):
    _, ssa = run_symex(friend18_source, "friend18.cpp")
    f = encode(ssa)
    res = solve(f, "builtin")
    trace = reconstruct(res.model, ssa, f)
    order = {eq.lhs: i for i, eq in enumerate(ssa.equations)}
    indices = [order[s.symbol] for s in trace.steps]
    assert indices == sorted(indices)


# -- reduced-width exhaustive checks -------------------------------------------


def _arith_system(op: str):
    """a op b with overflow claims over two free 8-bit operands."""
    ssa = SsaSystem()
    ssa.sym_tys = {"a#1": "int", "b#1": "int", "r#1": "int"}
    from minicpp_bmc.symex import NondetRecord

    ssa.nondets = [NondetRecord("a#1", Const(1, "bool")), NondetRecord("b#1", Const(1, "bool"))]
    a, b = Sym("a#1"), Sym("b#1")
    ssa.equations = [Equation(Const(1, "bool"), "r#1", Bin(op, a, b), "int", NO_LOC)]
    claims = []
    if op in ("add", "sub", "mul"):
        claims.append(NoOverflow(op, a, b))
    else:
        claims.append(Bin("ne", b, Const(0)))
        claims.append(NoOverflow("div", a, b))
    for c in claims:
        ssa.properties.append(Property(Const(1, "bool"), c, "overflow", f"overflow {op}", NO_LOC, "main"))
    return ssa


@pytest.mark.parametrize("op", ["add", "sub", "mul", "div", "rem"])
def test_exhaustive_8bit_overflow_literals(op):
    # the encoded claim evaluates exactly like brute-force arithmetic over
    # all 8-bit operand pairs
    ssa = _arith_system(op)
    f = encode(ssa, width=8)
    lo, hi = -128, 127
    any_violation = {i: False for i in range(len(f.prop_literals))}
    for a in range(lo, hi + 1):
        for b in range(lo, hi + 1):
            model = {"a#1": a, "b#1": b}
            for i, (_, lit) in enumerate(f.prop_literals):
                got = bool(eval_with_model(lit, model, 8))
                want = _expected_claim(op, i, a, b)
                assert got == want, (op, i, a, b)
                if not got:
                    any_violation[i] = True
    # solver agreement: attacking each literal is sat iff a violating pair exists
    for i in range(len(f.prop_literals)):
        res = solve(f, "builtin", negate_props=[i], timeout=120)
        assert (res.status == "sat") == any_violation[i], (op, i)
        if res.status == "sat":
            ok, _ = check_model_validity(f, res.model)
            assert ok


def _expected_claim(op, idx, a, b):
    if op in ("add", "sub", "mul"):
        v = {"add": a + b, "sub": a - b, "mul": a * b}[op]
        return -128 <= v <= 127
    if idx == 0:
        return b != 0
    return not (a == -128 and b == -1)


def test_exhaustive_8bit_bounds():
    # bounds literal over one free 8-bit index for a 5-cell array
    from minicpp_bmc.symex import NondetRecord

    ssa = SsaSystem()
    ssa.sym_tys = {"i#1": "int"}
    ssa.nondets = [NondetRecord("i#1", Const(1, "bool"))]
    i = Sym("i#1")
    claim = Bin("and", Bin("ge", i, Const(0)), Bin("lt", i, Const(5)))
    ssa.properties = [Property(Const(1, "bool"), claim, "bounds", "oob", NO_LOC, "main")]
    f = encode(ssa, width=8)
    lit = f.prop_literals[0][1]
    for v in range(-128, 128):
        assert bool(eval_with_model(lit, {"i#1": v}, 8)) == (0 <= v < 5)
    assert solve(f, "builtin").status == "sat"


@given(st.integers(-(2**31), 2**31 - 1), st.integers(-(2**31), 2**31 - 1))
@settings(max_examples=120, deadline=None)
def test_evaluator_matches_concrete_ops(a, b):
    from minicpp_bmc.exprs import eval_binop

    for op in ("add", "sub", "mul", "div", "rem", "lt", "ge", "eq"):
        e = Bin(op, Sym("a#1"), Sym("b#1"))
        assert eval_with_model(e, {"a#1": a, "b#1": b}) == eval_binop(op, a, b)


def test_unsupported_operator_rejected():
    from minicpp_bmc.diagnostics import EncodeError
    from minicpp_bmc.symex import NondetRecord

    ssa = SsaSystem()
    ssa.sym_tys = {"x#1": "int"}
    ssa.equations = [Equation(Const(1, "bool"), "x#1", Bin("shl", Const(1), Const(2)), "int", NO_LOC)]
    with pytest.raises(EncodeError):
        encode(ssa)


def test_reduced_width_rejects_pointers():
    from minicpp_bmc.diagnostics import EncodeError

    ssa = SsaSystem()
    ssa.sym_tys = {"p#1": "ptr"}
    ssa.equations = [Equation(Const(1, "bool"), "p#1", Const(0, "ptr"), "ptr", NO_LOC)]
    with pytest.raises(EncodeError):
        encode(ssa, width=8)
