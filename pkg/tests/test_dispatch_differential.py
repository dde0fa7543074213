"""Differential fuzzing of virtual dispatch: random hierarchies, every
property compared between the symbolic pipeline and the interpreter."""
import pytest

from minicpp_bmc.encode import encode
from minicpp_bmc.interp import ChecksConfig, interpret_concrete
from minicpp_bmc.lowering import lower
from minicpp_bmc.parser import parse_source
from minicpp_bmc.randprog import generate_class_program
from minicpp_bmc.sema import synthesize_defaults, typecheck
from minicpp_bmc.solver import BuiltinSession
from minicpp_bmc.symex import UnwindConfig, symex
from minicpp_bmc.templates import monomorphize


@pytest.mark.parametrize("seed", range(60))
def test_dispatch_program_agrees(seed):
    src = generate_class_program(seed)
    memory = seed % 2 == 0
    ast, _ = typecheck(parse_source(src, f"cg{seed}.cpp"))
    model = lower(monomorphize(synthesize_defaults(ast)))
    interp = interpret_concrete(model, [], checks=ChecksConfig(memory=memory), stop_at_first=False)
    ssa = symex(model, UnwindConfig(memory=memory, simplify=(seed % 4 < 2)))
    formula = encode(ssa)
    expected = {}
    for c in interp.checks:
        expected.setdefault(c.key, []).append(not c.ok)
    session = BuiltinSession(formula)
    seen = {}
    for i, prop in enumerate(ssa.properties):
        res = session.solve([i], timeout=120)
        assert res.status in ("sat", "unsat")
        occ = seen.get(prop.key, 0)
        seen[prop.key] = occ + 1
        exp_list = expected.get(prop.key, [])
        exp = exp_list[occ] if occ < len(exp_list) else False
        assert (res.status == "sat") == exp, (seed, prop.key, occ)
