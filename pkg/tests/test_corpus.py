import io

import pytest

import conftest
from conftest import build_model, unwind_from_flags
from minicpp_bmc.driver import RunConfig, verify_file
from minicpp_bmc.interp import ChecksConfig, interpret_concrete

CASES = conftest.corpus_cases()
IDS = ["/".join(p.split("/")[-2:])[:-4] for p, _, _ in CASES]


def test_corpus_is_large_enough():
    cats = {p.split("/")[-2] for p, _, _ in CASES}
    assert len(CASES) >= 60
    assert cats == {
        "cpp-sub",
        "inheritance-sub",
        "polymorphism-sub",
        "cbmc-template-sub",
        "gcc-template-tests-sub",
        "template-sub",
    }
    for cat in cats:
        assert sum(1 for p, _, _ in CASES if p.split("/")[-2] == cat) >= 10


@pytest.mark.parametrize("path,expect,flags", CASES, ids=IDS)
def test_expected_verdict(path, expect, flags):
    cfg = RunConfig(input_path=path, unwind=unwind_from_flags(flags), timeout=120)
    outcome = verify_file(cfg, out=io.StringIO())
    assert outcome.verdict.status == expect
    assert outcome.exit_code == (0 if expect == "SUCCESSFUL" else 1)


@pytest.mark.parametrize("path,expect,flags", CASES, ids=IDS)
def test_replay_reproduces_violation(path, expect, flags):
    if expect != "FAILED":
        pytest.skip("replay applies to FAILED cases")
    cfg = RunConfig(input_path=path, unwind=unwind_from_flags(flags), timeout=120)
    outcome = verify_file(cfg, out=io.StringIO())
    assert outcome.verdict.status == "FAILED"
    trace = outcome.verdict.trace
    uc = cfg.unwind
    model = build_model(open(path).read(), path)
    r = interpret_concrete(
        model,
        trace.replay_values(),
        checks=ChecksConfig(overflow=uc.overflow, bounds=uc.bounds, memory=uc.memory),
    )
    assert r.verdict == "FAILED"
    p = outcome.verdict.violated
    assert r.violated.key == (p.kind, p.loc.file, p.loc.line, p.loc.column, p.description)


@pytest.mark.parametrize("path,expect,flags", CASES, ids=IDS)
def test_symbolic_matches_interpreter(path, expect, flags):
    # oracle equivalence on the corpus: for deterministic cases the
    # symbolic verdict equals the concrete interpreter's verdict
    from minicpp_bmc.diagnostics import OracleError

    src = open(path).read()
    model = build_model(src, path)
    uc = unwind_from_flags(flags)
    try:
        r = interpret_concrete(
            model, [], checks=ChecksConfig(overflow=uc.overflow, bounds=uc.bounds, memory=uc.memory)
        )
    except OracleError:
        pytest.skip("nondeterministic case")
    if r.nondet_consumed:
        pytest.skip("nondeterministic case")
    cfg = RunConfig(input_path=path, unwind=uc, timeout=120)
    outcome = verify_file(cfg, out=io.StringIO())
    assert outcome.verdict.status == r.verdict


@pytest.mark.parametrize("path,expect,flags", CASES, ids=IDS)
def test_query_strategies_agree(path, expect, flags):
    # the single all-claims query and the per-property loop reach the same
    # verdict on every corpus case
    uc = unwind_from_flags(flags)
    one = verify_file(RunConfig(input_path=path, unwind=uc, timeout=120), out=io.StringIO())
    per = verify_file(
        RunConfig(input_path=path, unwind=uc, timeout=120, per_property=True), out=io.StringIO()
    )
    assert one.verdict.status == per.verdict.status == expect
