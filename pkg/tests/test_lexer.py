import pytest
from hypothesis import given
from hypothesis import strategies as st

from minicpp_bmc.diagnostics import LexError
from minicpp_bmc.lexer import tokenize


def test_simple_program_token_count():
    toks = tokenize("int main(){return 0;}")
    assert len(toks) == 9
    assert toks[-1].text == "}"


def test_bird_penguin_tokens(bird_source):
    texts = [t.text for t in tokenize(bird_source, "bird.cpp")]
    assert "virtual" in texts
    assert "doit" in texts
    assert "override" in texts


def test_illegal_character_location():
    with pytest.raises(LexError) as exc:
        tokenize("int x = @;")
    assert exc.value.loc.line == 1
    assert exc.value.loc.column == 9


def test_unterminated_comment():
    with pytest.raises(LexError) as exc:
        tokenize("int x; /* never closed")
    assert "unterminated" in exc.value.message


def test_comments_skipped():
    toks = tokenize("int x; // line comment\n/* block */ int y;")
    assert [t.text for t in toks] == ["int", "x", ";", "int", "y", ";"]


def test_include_cassert_ignored():
    toks = tokenize("#include <cassert>\nint x;")
    assert [t.text for t in toks] == ["int", "x", ";"]


def test_other_preprocessor_rejected():
    with pytest.raises(LexError):
        tokenize("#include <vector>\n")
    with pytest.raises(LexError):
        tokenize("#define N 5\n")


def test_exceptions_rejected():
    with pytest.raises(LexError) as exc:
        tokenize("try { }")
    assert "exception handling" in exc.value.message


def test_huge_literal_rejected():
    with pytest.raises(LexError):
        tokenize(str(2**63))
    assert tokenize(str(2**63 - 1))[0].value == 2**63 - 1


def test_location_monotonicity_corpus(bird_source, friend18_source):
    for src in (bird_source, friend18_source):
        toks = tokenize(src)
        positions = [(t.loc.line, t.loc.column) for t in toks]
        assert positions == sorted(positions)


@given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
def test_tokenize_total(text):
    # any input either tokenizes or raises LexError with an in-range location
    try:
        toks = tokenize(text)
    except LexError as e:
        assert e.loc.line >= 1 and e.loc.column >= 1
        return
    positions = [(t.loc.line, t.loc.column) for t in toks]
    assert positions == sorted(positions)
