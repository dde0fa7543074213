import pytest

import conftest
from conftest import build_model, run_symex, unwind_from_flags
from minicpp_bmc.encode import encode
from minicpp_bmc.exprs import Bin, Const, Sym, render
from minicpp_bmc.interp import interpret_concrete
from minicpp_bmc.solver import solve
from minicpp_bmc.symex import SsaSystem, UnwindConfig, symex


def test_forced_ssa_shape():
    _, ssa = run_symex("int main(){ int x; x = 1; x = x + 1; assert(x == 2); return 0; }", simplify=False)
    eqs = [e for e in ssa.equations]
    assert eqs[0].lhs == "main::x#1"
    assert render(eqs[0].rhs) == "1"
    assert eqs[1].lhs == "main::x#2"
    assert render(eqs[1].rhs) == "x#1 + 1"
    (prop,) = ssa.properties
    assert render(prop.claim) == "x#2 == 2"


def test_single_assignment_validates():
    _, ssa = run_symex("int main(){ int a = 1; int b = a + a; assert(b == 2); return 0; }")
    ssa.validate_single_assignment()
    with pytest.raises(AssertionError):
        bad = SsaSystem()
        from minicpp_bmc.diagnostics import NO_LOC
        from minicpp_bmc.symex import Equation

        bad.equations = [Equation(Const(1, "bool"), "x#1", Const(1), "int", NO_LOC)] * 2
        bad.validate_single_assignment()


SUM_LOOP = """
int main() {
  int s = 0;
  int i = 1;
  while (i <= 5) {
    s = s + i;
    i = i + 1;
  }
  assert(s == 15);
  return 0;
}
"""


def test_loop_within_bound_valid():
    # the oracle says 5 iterations are needed; k=10 covers them
    model = build_model(SUM_LOOP)
    r = interpret_concrete(model)
    assert r.verdict == "SUCCESSFUL"
    ssa = symex(model, UnwindConfig(k=10, unwinding_assertions=True))
    f = encode(ssa)
    assert solve(f, "builtin").status == "unsat"
    assert not any(p.kind == "unwinding" for p in ssa.properties)


def test_loop_bound_too_small_unwinding_violated():
    model = build_model(SUM_LOOP)
    ssa = symex(model, UnwindConfig(k=3, unwinding_assertions=True))
    unwinding = [i for i, p in enumerate(ssa.properties) if p.kind == "unwinding"]
    assert unwinding
    f = encode(ssa)
    res = solve(f, "builtin", negate_props=unwinding)
    assert res.status == "sat"


def test_friend18_single_assertion_property(friend18_source):
    _, ssa = run_symex(friend18_source, "friend18.cpp", simplify=False)
    props = [p for p in ssa.properties if p.kind == "assertion"]
    assert len(props) == 1
    assert "return_value" in render(props[0].claim)
    assert "12345678" in render(props[0].claim)


def test_int_max_plus_one_overflow():
    _, ssa = run_symex(
        "int main(){ int x = 2147483647; int y = x + 1; return 0; }", overflow=True
    )
    over = [p for p in ssa.properties if p.kind == "overflow"]
    assert len(over) == 1
    f = encode(ssa)
    assert solve(f, "builtin").status == "sat"


def test_monotonic_in_k_corpus():
    # a property violated at bound k stays violated at k+1
    for path, expect, flags in conftest.corpus_cases():
        if expect != "FAILED":
            continue
        cfg = unwind_from_flags(flags)
        model = build_model(open(path).read(), path)
        for k in (cfg.k, cfg.k + 1):
            c2 = UnwindConfig(
                k=k,
                unwinding_assertions=cfg.unwinding_assertions,
                overflow=cfg.overflow,
                bounds=cfg.bounds,
                memory=cfg.memory,
            )
            ssa = symex(model, c2)
            res = solve(encode(ssa), "builtin", timeout=120)
            assert res.status == "sat", (path, k)


def test_single_assignment_corpus():
    for path, _expect, flags in conftest.corpus_cases():
        model = build_model(open(path).read(), path)
        ssa = symex(model, unwind_from_flags(flags))
        ssa.validate_single_assignment()
        defined = {eq.lhs for eq in ssa.equations}
        nondet = {r.name for r in ssa.nondets}
        seen: set = set()
        from minicpp_bmc.exprs import walk_syms

        for eq in ssa.equations:
            used: set = set()
            walk_syms(eq.guard, used)
            walk_syms(eq.rhs, used)
            for s in used:
                assert s in seen or s in nondet, (path, eq.lhs, s)
            seen.add(eq.lhs)


def test_branch_merge_shape():
    _, ssa = run_symex(
        "int main(){ int x = nondet_int(); int y; if (x > 0) { y = 1; } else { y = 2; } assert(y <= 2); return 0; }",
        simplify=False,
    )
    merges = [e for e in ssa.equations if e.lhs.startswith("main::y#") and "?" in render(e.rhs)]
    assert len(merges) == 1


def test_guarded_equations():
    _, ssa = run_symex(
        "int main(){ int x = nondet_int(); int y = 0; if (x > 0) { y = 5; } assert(y == 0 || y == 5); return 0; }",
        simplify=False,
    )
    guarded = [e for e in ssa.equations if not (isinstance(e.guard, Const) and e.guard.value)]
    assert guarded  # assignments inside the branch carry the branch guard


def test_missing_entry():
    from minicpp_bmc.diagnostics import SymexError

    model = build_model("int main(){ return 0; }")
    model.entry = "nope()"
    with pytest.raises(SymexError):
        symex(model, UnwindConfig())


def test_recursion_bounded():
    _, ssa = run_symex(
        "int f(int n) { if (n <= 0) { return 0; } return f(n - 1) + 1; }\n"
        "int main() { assert(f(3) == 3); return 0; }",
        k=10,
    )
    f = encode(ssa)
    assert solve(f, "builtin").status == "unsat"


def test_recursion_cut_assumed():
    model = build_model(
        "int f(int n) { if (n <= 0) { return 0; } return f(n - 1) + 1; }\n"
        "int main() { int r = f(20); assert(r == 20); return 0; }"
    )
    ssa = symex(model, UnwindConfig(k=3, unwinding_assertions=True))
    assert any(p.kind == "unwinding" for p in ssa.properties)


def test_pointers_stored_in_arrays_resolve():
    # constant-index loads fold through the array definition chain, so the
    # loaded pointer resolves to its object
    src = """
int main() {
  int x = 5;
  int y = 9;
  int* ptrs[2];
  ptrs[0] = &x;
  ptrs[1] = &y;
  assert(*ptrs[0] + *ptrs[1] == 14);
  *ptrs[1] = 20;
  assert(y == 20);
  return 0;
}
"""
    model = build_model(src)
    assert interpret_concrete(model).verdict == "SUCCESSFUL"
    res = solve(encode(symex(model, UnwindConfig())), "builtin")
    assert res.status == "unsat"


NESTED_LOOP = """
int main() {
  int total = 0;
  for (int i = 0; i < 4; i = i + 1) {
    for (int j = 0; j < 5; j = j + 1) {
      total = total + 1;
    }
  }
  assert(total == 20);
  return 0;
}
"""


def test_nested_loops_fresh_inner_budget():
    # the inner loop needs 5 iterations per entry; a bound of 10 covers it
    # even though the inner body runs 20 times in total
    model = build_model(NESTED_LOOP)
    ssa = symex(model, UnwindConfig(k=10, unwinding_assertions=True))
    assert solve(encode(ssa), "builtin").status == "unsat"
    assert not any(p.kind == "unwinding" for p in ssa.properties)


def test_nested_loops_bound_still_enforced():
    model = build_model(NESTED_LOOP)
    ssa = symex(model, UnwindConfig(k=4, unwinding_assertions=True))
    assert any(p.kind == "unwinding" for p in ssa.properties)
    assert solve(encode(ssa), "builtin").status == "sat"
