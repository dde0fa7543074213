import glob
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS
from minicpp_bmc.ast_nodes import (
    Binary,
    Call,
    ClassDecl,
    FunctionDecl,
    TemplateDecl,
    TemplateId,
    VarDecl,
    pretty_print,
    structural_eq,
)
from minicpp_bmc.diagnostics import LexError, ParseError
from minicpp_bmc.lexer import tokenize
from minicpp_bmc.parser import parse_source
from minicpp_bmc.randprog import generate_program


def test_empty_file():
    assert parse_source("").decls == []


def test_bird_penguin_shape(bird_source):
    ast = parse_source(bird_source, "bird.cpp")
    bird, penguin, main = ast.decls
    assert isinstance(bird, ClassDecl) and bird.name == "Bird"
    (doit,) = [m for m in bird.members if isinstance(m, FunctionDecl)]
    assert doit.is_virtual and not doit.is_override
    assert isinstance(penguin, ClassDecl) and penguin.name == "Penguin"
    assert penguin.bases[0].ty.name == "Bird" and not penguin.bases[0].virtual
    (pdoit,) = [m for m in penguin.members if isinstance(m, FunctionDecl)]
    assert pdoit.is_override
    assert isinstance(main, FunctionDecl) and main.name == "main"


def test_friend18_shape(friend18_source):
    ast = parse_source(friend18_source, "friend18.cpp")
    tmpl, bring, main = ast.decls
    assert isinstance(tmpl, TemplateDecl)
    assert tmpl.params[0].kind == "int" and tmpl.params[0].name == "N"
    assert isinstance(tmpl.decl, ClassDecl) and tmpl.decl.name == "X"
    (friend,) = tmpl.decl.members
    assert isinstance(friend, TemplateDecl) and friend.decl.is_friend
    assert friend.decl.name == "foo"
    assert isinstance(bring, VarDecl)
    assert bring.ty.name == "X" and bring.ty.targs[0].value == 1234
    # the assert parses as a template-arg call, not relational chains
    cond = main.body.stmts[0].cond
    assert isinstance(cond, Binary) and cond.op == "!="
    assert isinstance(cond.left, Call)
    assert isinstance(cond.left.callee, TemplateId)
    assert cond.left.callee.name == "foo"
    assert cond.left.callee.targs[0].value == 5678


def test_template_call_disambiguation():
    # `foo` is a declared template: parses as explicit-arg call
    ast = parse_source("template<int M> int foo() { return M; }\nint main() { return foo<3>(); }")
    ret = ast.decls[1].body.stmts[0]
    assert isinstance(ret.value, Call)
    # `a < b > (c)` with plain variables: relational expressions
    ast2 = parse_source("int main() { int a = 1; int b = 2; int c = 3; bool r = a < b > (c); return 0; }")
    r = ast2.decls[0].body.stmts[3]
    assert isinstance(r.init, Binary) and r.init.op == ">"


def test_parse_error_has_location():
    with pytest.raises(ParseError) as exc:
        parse_source("int main() { int x = ; }")
    assert exc.value.loc.line == 1
    assert exc.value.found == "';'"


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CORPUS, "*", "*.cpp"))))
def test_roundtrip_corpus(path):
    src = open(path).read()
    ast1 = parse_source(src, path)
    printed = pretty_print(ast1)
    ast2 = parse_source(printed, path + ".pp")
    assert structural_eq(ast1, ast2)


@given(st.integers(min_value=0, max_value=400))
@settings(max_examples=40, deadline=None)
def test_roundtrip_generated(seed):
    src = generate_program(seed)
    ast1 = parse_source(src)
    ast2 = parse_source(pretty_print(ast1))
    assert structural_eq(ast1, ast2)


@given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=2000), st.text(max_size=3))
@settings(max_examples=60, deadline=None)
def test_error_totality_mutated(seed, pos, junk):
    # mutating a valid program never crashes the parser: it either parses
    # or reports a located diagnostic
    src = generate_program(seed)
    mutated = src[: pos % len(src)] + junk + src[pos % len(src) :]
    try:
        parse_source(mutated, "mut.cpp")
    except (LexError, ParseError) as e:
        assert e.loc.line >= 1


def test_precedence():
    ast = parse_source("int main() { int x = 1 + 2 * 3 - 4 / 2; return x; }")
    # 1 + (2*3) - (4/2): top node is the subtraction
    init = ast.decls[0].body.stmts[0].init
    assert init.op == "-"
    assert init.left.op == "+"
