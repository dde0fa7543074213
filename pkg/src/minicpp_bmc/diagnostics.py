"""Source locations and the error hierarchy shared by all pipeline stages."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class SourceLoc:
    """1-based position inside an input file."""

    file: str
    line: int
    column: int

    def __post_init__(self) -> None:
        assert self.line >= 1 and self.column >= 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NO_LOC = SourceLoc("<builtin>", 1, 1)


class MiniCppError(Exception):
    """Base for every diagnostic raised by the verifier pipeline."""

    severity = "error"

    def __init__(self, loc: SourceLoc | None, message: str):
        self.loc = loc if loc is not None else NO_LOC
        self.message = message
        super().__init__(message)

    def render(self) -> str:
        return f"{self.severity}: {self.loc}: {self.message}"


class LexError(MiniCppError):
    pass


class ParseError(MiniCppError):
    def __init__(self, loc: SourceLoc | None, expected, found: str):
        self.expected = tuple(expected)
        self.found = found
        want = ", ".join(self.expected)
        super().__init__(loc, f"expected {want}, found {found}")


class TypeCheckError(MiniCppError):
    pass


class TemplateError(MiniCppError):
    pass


class LayoutError(MiniCppError):
    pass


class LoweringError(MiniCppError):
    pass


class SymexError(MiniCppError):
    pass


class EncodeError(MiniCppError):
    pass


class SolverError(MiniCppError):
    def __init__(self, message: str):
        super().__init__(NO_LOC, message)


class ReconstructError(MiniCppError):
    def __init__(self, message: str):
        super().__init__(NO_LOC, message)


class OracleError(MiniCppError):
    def __init__(self, message: str):
        super().__init__(NO_LOC, message)
