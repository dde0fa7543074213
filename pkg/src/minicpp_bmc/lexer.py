"""Tokenizer for MiniC++ source text."""
from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import LexError, SourceLoc

KEYWORDS = frozenset(
    {
        "assert",
        "bool",
        "class",
        "const",
        "delete",
        "else",
        "false",
        "for",
        "friend",
        "if",
        "int",
        "new",
        "nullptr",
        "private",
        "protected",
        "public",
        "return",
        "struct",
        "template",
        "this",
        "true",
        "typedef",
        "typename",
        "virtual",
        "void",
        "while",
        "override",
    }
)

# Longest match first.  `>>` is deliberately absent: nested template argument
# lists need `> >` folding at the parser level, and MiniC++ has no shifts.
PUNCTUATION = (
    "::",
    "->",
    "&&",
    "||",
    "==",
    "!=",
    "<=",
    ">=",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    "<",
    ">",
    ";",
    ",",
    ".",
    "+",
    "-",
    "*",
    "/",
    "%",
    "=",
    "!",
    "&",
    "~",
    ":",
)

REJECTED_KEYWORDS = {"try": "exception handling", "catch": "exception handling", "throw": "exception handling"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'kw', 'ident', 'int', 'punct', 'eof'
    text: str
    loc: SourceLoc
    value: int | None = None  # integer literals only

    def __str__(self) -> str:
        return f"{self.kind}({self.text})@{self.loc.line}:{self.loc.column}"


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Scanner:
    def __init__(self, source: str, filename: str):
        self.src = source
        self.file = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def loc(self) -> SourceLoc:
        return SourceLoc(self.file, self.line, self.col)

    def at_end(self) -> bool:
        return self.pos >= len(self.src)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.at_end():
                return
            if self.src[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def skip_trivia(self) -> None:
        while not self.at_end():
            c = self.peek()
            if c in " \t\r\n":
                self.advance()
            elif c == "/" and self.peek(1) == "/":
                while not self.at_end() and self.peek() != "\n":
                    self.advance()
            elif c == "/" and self.peek(1) == "*":
                start = self.loc()
                self.advance(2)
                while not (self.peek() == "*" and self.peek(1) == "/"):
                    if self.at_end():
                        raise LexError(start, "unterminated block comment")
                    self.advance()
                self.advance(2)
            elif c == "#":
                self._skip_include()
            else:
                return

    def _skip_include(self) -> None:
        # The only preprocessor line accepted is `#include <cassert>`.
        start = self.loc()
        end = self.src.find("\n", self.pos)
        if end == -1:
            end = len(self.src)
        directive = self.src[self.pos : end].strip()
        normalized = " ".join(directive.split())
        if normalized != "#include <cassert>":
            raise LexError(start, f"unsupported preprocessor directive: {directive}")
        self.advance(end - self.pos)


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    """Convert source text to a token list (no EOF sentinel)."""
    sc = _Scanner(source, filename)
    tokens: list[Token] = []
    while True:
        sc.skip_trivia()
        if sc.at_end():
            return tokens
        loc = sc.loc()
        c = sc.peek()
        if c.isdigit():
            text = ""
            while sc.peek().isdigit():
                text += sc.peek()
                sc.advance()
            if _is_ident_start(sc.peek()):
                raise LexError(sc.loc(), f"malformed integer literal near '{text}{sc.peek()}'")
            value = int(text)
            if value >= 2**63:
                raise LexError(loc, f"integer literal {text} exceeds 64 bits")
            tokens.append(Token("int", text, loc, value))
        elif _is_ident_start(c):
            text = ""
            while _is_ident_char(sc.peek()):
                text += sc.peek()
                sc.advance()
            if text in REJECTED_KEYWORDS:
                raise LexError(loc, f"'{text}' unsupported: {REJECTED_KEYWORDS[text]} is out of scope")
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, loc))
        else:
            for p in PUNCTUATION:
                if sc.src.startswith(p, sc.pos):
                    sc.advance(len(p))
                    tokens.append(Token("punct", p, loc))
                    break
            else:
                raise LexError(loc, f"illegal character {c!r}")
