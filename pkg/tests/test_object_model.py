import pytest

from conftest import frontend
from minicpp_bmc.diagnostics import LayoutError
from minicpp_bmc.object_model import (
    build_layouts,
    build_object_model,
    build_vtables,
    dump_layouts,
)

DIAMOND = """
class Top { public: virtual int id() { return 1; } int t; };
class Left : virtual public Top { public: int l; };
class Right : virtual public Top { public: int r; };
class Bottom : public Left, public Right { public: int id() override { return 9; } };
int main() { Bottom b; return 0; }
"""

MULTI = """
class A { public: virtual int fa() { return 1; } };
class B { public: virtual int fb() { return 2; } };
class C : public A, public B { public: int fa() override { return 10; } int fb() override { return 20; } };
int main() { C c; return 0; }
"""


def vptr_count(layout):
    return sum(1 for s in layout.slots if s.kind == "vptr")


def test_bird_penguin_layouts(bird_source):
    ast = frontend(bird_source, "bird.cpp")
    layouts = build_layouts(ast)
    assert [s.kind for s in layouts["Bird"].slots] == ["vptr"]
    # Penguin: single vptr slot, inherited from Bird
    assert vptr_count(layouts["Penguin"]) == 1
    assert layouts["Penguin"].slots[0].origin == "Bird"


def test_bird_penguin_vtable_targets(bird_source):
    ast = frontend(bird_source, "bird.cpp")
    layouts = build_layouts(ast)
    vtables, thunks = build_vtables(layouts, ast)
    bp = vtables[("Bird", "Penguin")]
    assert bp.entries[0].target_kind == "thunk"
    assert bp.entries[0].target == "thunk::Penguin::doit(Bird*)"
    pp = vtables[("Penguin", "Penguin")]
    assert pp.entries[0].target_kind == "direct"
    assert pp.entries[0].target == "Penguin::doit(Penguin*)"
    bb = vtables[("Bird", "Bird")]
    assert bb.entries[0].target_kind == "direct"
    assert bb.entries[0].target == "Bird::doit(Bird*)"
    assert "thunk::Penguin::doit(Bird*)" in thunks


def test_two_vptrs_for_two_polymorphic_bases():
    ast = frontend(MULTI)
    layouts = build_layouts(ast)
    assert vptr_count(layouts["C"]) == 2


def test_diamond_single_shared_vbase_vptr():
    ast = frontend(DIAMOND)
    layouts = build_layouts(ast)
    bottom = layouts["Bottom"]
    top_slots = [s for s in bottom.slots if s.kind == "vptr" and s.origin == "Top"]
    assert len(top_slots) == 1
    assert bottom.vbases == ["Top"]
    # Top appears exactly once in the layout
    assert bottom.base_offsets["Top"] >= 0


def test_crossed_diamond_rejected():
    src = """
class Top { public: virtual int id() { return 1; } };
class Left : virtual public Top { public: int l; };
class Right : public Top { public: int r; };
class Bottom : public Left, public Right { public: int x; };
int main() { Bottom b; return 0; }
"""
    ast = frontend(src)
    with pytest.raises(LayoutError) as exc:
        build_layouts(ast)
    assert "crossed diamond" in exc.value.message


def test_duplicate_nonvirtual_base_rejected():
    src = """
class Top { public: int t; };
class Left : public Top { public: int l; };
class Right : public Top { public: int r; };
class Bottom : public Left, public Right { public: int x; };
int main() { Bottom b; return 0; }
"""
    ast = frontend(src)
    with pytest.raises(LayoutError):
        build_layouts(ast)


def test_vptr_count_equals_distinct_vtable_slots(corpus_models):
    for ast, om in corpus_models:
        world = ast.world
        for cls, layout in om.layouts.items():
            distinct_slots = {off for off in layout.vptr_views.values()}
            assert vptr_count(layout) == len(distinct_slots)


def test_dispatch_soundness_oracle(corpus_models):
    # brute-force oracle: walking the class DAG for the nearest overrider
    # must agree with the vtable entry target for every (view, dyn, method)
    for ast, om in corpus_models:
        world = ast.world
        for (view, dyn), vt in om.vtables.items():
            for idx, entry in enumerate(vt.entries):
                sig = entry.sig_key
                expected = _oracle_final_overrider(world, dyn, sig)
                if entry.target_kind == "direct":
                    got = entry.target
                else:
                    got = om.thunks[entry.target].target
                assert got == expected, (view, dyn, sig, got, expected)


def _oracle_final_overrider(world, dyn, sig):
    # independent walk: breadth of the inheritance DAG, nearest definition
    if sig == ("~dtor", ()):
        return world.classes[dyn].dtor.mangled
    frontier = [dyn]
    while frontier:
        for c in frontier:
            m = world.classes[c].own_method(sig)
            if m is not None:
                return m.mangled
        nxt = []
        for c in frontier:
            for b, _v in world.classes[c].bases:
                if b not in nxt:
                    nxt.append(b)
        frontier = nxt
    raise AssertionError(f"no overrider for {sig} from {dyn}")


def test_vptr_init_annotations(bird_source):
    ast = frontend(bird_source, "bird.cpp")
    build_object_model(ast)
    penguin = ast.world.classes["Penguin"]
    for ctor in penguin.ctors:
        assert ctor.vptr_inits == [(0, "Bird@Penguin", "Bird")]
    bird = ast.world.classes["Bird"]
    for ctor in bird.ctors:
        assert ctor.vptr_inits == [(0, "Bird@Bird", "Bird")]


def test_nonpolymorphic_ctor_untouched():
    ast = frontend("class Plain { public: int v; };\nint main() { Plain p; return 0; }")
    build_object_model(ast)
    for ctor in ast.world.classes["Plain"].ctors:
        assert ctor.vptr_inits == []


def test_layout_dump_stable(bird_source):
    ast = frontend(bird_source, "bird.cpp")
    om1 = build_object_model(ast)
    text1 = dump_layouts(ast, om1)
    ast2 = frontend(bird_source, "bird.cpp")
    om2 = build_object_model(ast2)
    assert text1 == dump_layouts(ast2, om2)
    assert "Bird@Penguin[0] = thunk::Penguin::doit(Bird*)" in text1


@pytest.fixture(scope="module")
def corpus_models():
    import conftest

    out = []
    for path, _expect, _flags in conftest.corpus_cases():
        src = open(path).read()
        try:
            ast = frontend(src, path)
        except Exception:
            continue
        om = build_object_model(ast)
        if any(len(i.methods) > 0 for i in ast.world.classes.values()):
            out.append((ast, om))
    assert out
    return out
