"""Syntax tree for MiniC++ translation units, plus the pretty printer.

Nodes are plain mutable dataclasses; the type checker annotates them in
place (`ty`, resolution fields).  Structural comparison for round-trip
tests goes through `structural_eq`, which ignores locations and
annotations.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import NO_LOC, SourceLoc

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class TypeRef:
    """A (possibly still syntactic) type reference.

    kind: 'int' | 'bool' | 'void' | 'class' | 'named' | 'ptr' | 'ref' | 'array'
    'named' only exists before semantic resolution; 'class' afterwards.
    """

    kind: str
    name: str = ""
    inner: Optional["TypeRef"] = None
    length: Optional[int] = None
    length_expr: Optional["Expr"] = None
    targs: list = field(default_factory=list)  # TypeRef or Expr arguments

    def is_scalar(self) -> bool:
        return self.kind in ("int", "bool", "ptr")

    def __str__(self) -> str:
        return type_text(self)


INT = TypeRef("int")
BOOL = TypeRef("bool")
VOID = TypeRef("void")


def ptr_to(t: TypeRef) -> TypeRef:
    return TypeRef("ptr", inner=t)


def class_type(name: str) -> TypeRef:
    return TypeRef("class", name=name)


def type_text(t: TypeRef) -> str:
    if t.kind in ("int", "bool", "void"):
        return t.kind
    if t.kind in ("class", "named"):
        if t.targs:
            return f"{t.name}<{', '.join(targ_text(a) for a in t.targs)}>"
        return t.name
    if t.kind == "ptr":
        return type_text(t.inner) + "*"
    if t.kind == "ref":
        return type_text(t.inner) + "&"
    if t.kind == "array":
        n = t.length if t.length is not None else expr_text(t.length_expr)
        return f"{type_text(t.inner)}[{n}]"
    raise AssertionError(t.kind)


def targ_text(a) -> str:
    return type_text(a) if isinstance(a, TypeRef) else expr_text(a)


def same_type(a: TypeRef, b: TypeRef) -> bool:
    """Structural equality of resolved types."""
    if a.kind != b.kind:
        return False
    if a.kind in ("int", "bool", "void"):
        return True
    if a.kind in ("class", "named"):
        return a.name == b.name and len(a.targs) == len(b.targs) and all(
            _targ_eq(x, y) for x, y in zip(a.targs, b.targs)
        )
    if a.kind in ("ptr", "ref"):
        return same_type(a.inner, b.inner)
    if a.kind == "array":
        return a.length == b.length and same_type(a.inner, b.inner)
    return False


def _targ_eq(x, y) -> bool:
    if isinstance(x, TypeRef) and isinstance(y, TypeRef):
        return same_type(x, y)
    if isinstance(x, TypeRef) or isinstance(y, TypeRef):
        return False
    return structural_eq(x, y)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Expr:
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)
    ty: Optional[TypeRef] = field(default=None, kw_only=True)


@dataclass(eq=False)
class IntLit(Expr):
    value: int = 0


@dataclass(eq=False)
class BoolLit(Expr):
    value: bool = False


@dataclass(eq=False)
class NullLit(Expr):
    pass


@dataclass(eq=False)
class Ident(Expr):
    name: str = ""


@dataclass(eq=False)
class ThisExpr(Expr):
    pass


@dataclass(eq=False)
class Unary(Expr):
    op: str = ""  # - ! * &
    operand: Expr = None


@dataclass(eq=False)
class Binary(Expr):
    op: str = ""  # + - * / % == != < <= > >= && ||
    left: Expr = None
    right: Expr = None


@dataclass(eq=False)
class AssignExpr(Expr):
    target: Expr = None
    value: Expr = None


@dataclass(eq=False)
class IndexExpr(Expr):
    base: Expr = None
    index: Expr = None


@dataclass(eq=False)
class Member(Expr):
    base: Expr = None
    name: str = ""
    arrow: bool = False


@dataclass(eq=False)
class TemplateId(Expr):
    """`name<args>` naming a template instance in expression position."""

    name: str = ""
    targs: list = field(default_factory=list)
    resolved: str = ""  # mangled instance name, set by monomorphization


@dataclass(eq=False)
class Call(Expr):
    callee: Expr = None
    args: list = field(default_factory=list)
    resolved: str = ""  # mangled target for non-virtual calls, set by sema


@dataclass(eq=False)
class NewExpr(Expr):
    alloc_type: TypeRef = None
    args: Optional[list] = None  # None: no parenthesised initializer


@dataclass(eq=False)
class DeleteExpr(Expr):
    operand: Expr = None


@dataclass(eq=False)
class CastExpr(Expr):
    """Explicit C-style cast."""

    target_type: TypeRef = None
    operand: Expr = None


@dataclass(eq=False)
class ImplicitCast(Expr):
    """Inserted by the type checker; never produced by the parser."""

    kind: str = ""  # 'ptr_up' | 'ptr_down' | 'to_bool' | 'null_to_ptr'
    operand: Expr = None


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Stmt:
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


@dataclass(eq=False)
class Block(Stmt):
    stmts: list = field(default_factory=list)


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: Expr = None


@dataclass(eq=False)
class IfStmt(Stmt):
    cond: Expr = None
    then_body: Stmt = None
    else_body: Optional[Stmt] = None


@dataclass(eq=False)
class WhileStmt(Stmt):
    cond: Expr = None
    body: Stmt = None


@dataclass(eq=False)
class ForStmt(Stmt):
    init: Optional[Stmt] = None  # VarDecl or ExprStmt
    cond: Optional[Expr] = None
    step: Optional[Expr] = None
    body: Stmt = None


@dataclass(eq=False)
class ReturnStmt(Stmt):
    value: Optional[Expr] = None


@dataclass(eq=False)
class AssertStmt(Stmt):
    cond: Expr = None
    text: str = ""  # compact source rendering, used in violation reports


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Decl:
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


@dataclass(eq=False)
class Param:
    ty: TypeRef
    name: Optional[str] = None
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


@dataclass(eq=False)
class VarDecl(Decl, Stmt):
    name: str = ""
    ty: TypeRef = None
    init: Optional[Expr] = None
    ctor_args: Optional[list] = None  # `C a(x, y);`


@dataclass(eq=False)
class TypedefDecl(Decl):
    name: str = ""
    ty: TypeRef = None


@dataclass(eq=False)
class BaseSpec:
    ty: TypeRef  # named/class reference, possibly with template args
    virtual: bool = False
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


@dataclass(eq=False)
class FunctionDecl(Decl):
    name: str = ""
    ret: TypeRef = None
    params: list = field(default_factory=list)
    body: Optional[Block] = None
    is_virtual: bool = False
    is_override: bool = False
    is_ctor: bool = False
    is_dtor: bool = False
    is_friend: bool = False
    init_list: list = field(default_factory=list)  # (name, [Expr], loc)
    owner: Optional[str] = None  # class name for methods, set by sema
    mangled: str = ""  # set by sema
    synthesized: bool = False


@dataclass(eq=False)
class TemplateParam:
    kind: str  # 'type' | 'int'
    name: str
    default: object = None  # TypeRef or Expr
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


@dataclass(eq=False)
class TemplateDecl(Decl):
    params: list = field(default_factory=list)
    decl: object = None  # ClassDecl or FunctionDecl
    spec_args: Optional[list] = None  # full specialization arguments


@dataclass(eq=False)
class ClassDecl(Decl):
    name: str = ""
    keyword: str = "class"  # 'class' | 'struct' (synonyms)
    bases: list = field(default_factory=list)
    members: list = field(default_factory=list)  # VarDecl (fields), FunctionDecl, TemplateDecl (friend templates), TypedefDecl
    targs: list = field(default_factory=list)  # instantiation arguments (monomorphized classes)


@dataclass(eq=False)
class Program:
    decls: list = field(default_factory=list)
    loc: SourceLoc = field(default=NO_LOC, kw_only=True)


# ---------------------------------------------------------------------------
# Structural equality (ignores locations and sema annotations)
# ---------------------------------------------------------------------------

_IGNORED_FIELDS = {"loc", "ty", "resolved", "mangled", "owner"}


def structural_eq(a, b) -> bool:
    if a is None or b is None:
        return a is b
    if isinstance(a, SourceLoc) and isinstance(b, SourceLoc):
        return True
    if type(a) is not type(b):
        return False
    if dataclasses.is_dataclass(a):
        for f in dataclasses.fields(a):
            if f.name in _IGNORED_FIELDS:
                continue
            # TypeRef carries `ty`-free payload; its own fields all matter
            # except the syntactic/resolved length split.
            va, vb = getattr(a, f.name), getattr(b, f.name)
            if isinstance(a, TypeRef) and f.name in ("length", "length_expr"):
                continue
            if not structural_eq(va, vb):
                return False
        if isinstance(a, TypeRef):
            la = a.length if a.length is not None else _const_len(a.length_expr)
            lb = b.length if b.length is not None else _const_len(b.length_expr)
            if not structural_eq(la, lb):
                return False
        return True
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(structural_eq(x, y) for x, y in zip(a, b))
    return a == b


def _const_len(e):
    if isinstance(e, IntLit):
        return e.value
    return e


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 4,
    "<=": 4,
    ">": 4,
    ">=": 4,
    "+": 5,
    "-": 5,
    "*": 6,
    "/": 6,
    "%": 6,
}
_UNARY_PREC = 7


def expr_text(e: Expr, compact: bool = True) -> str:
    """Render an expression; compact mode drops all interior spaces."""
    sp = "" if compact else " "

    def prec(x: Expr) -> int:
        if isinstance(x, Binary):
            return _PRECEDENCE[x.op]
        if isinstance(x, AssignExpr):
            return 0
        return _UNARY_PREC + 1

    def walk(x: Expr, parent_prec: int = 0) -> str:
        if isinstance(x, IntLit):
            s = str(x.value)
        elif isinstance(x, BoolLit):
            s = "true" if x.value else "false"
        elif isinstance(x, NullLit):
            s = "nullptr"
        elif isinstance(x, Ident):
            s = x.name
        elif isinstance(x, ThisExpr):
            s = "this"
        elif isinstance(x, TemplateId):
            s = f"{x.name}<{f',{sp}'.join(targ_text(a) for a in x.targs)}>"
        elif isinstance(x, Unary):
            s = x.op + walk(x.operand, _UNARY_PREC)
        elif isinstance(x, Binary):
            p = _PRECEDENCE[x.op]
            s = f"{walk(x.left, p)}{sp}{x.op}{sp}{walk(x.right, p + 1)}"
            if p < parent_prec:
                s = f"({s})"
            return s
        elif isinstance(x, AssignExpr):
            s = f"{walk(x.target, 1)}{sp}={sp}{walk(x.value, 0)}"
            if parent_prec > 0:
                s = f"({s})"
            return s
        elif isinstance(x, IndexExpr):
            s = f"{walk(x.base, _UNARY_PREC + 1)}[{walk(x.index)}]"
        elif isinstance(x, Member):
            s = f"{walk(x.base, _UNARY_PREC + 1)}{'->' if x.arrow else '.'}{x.name}"
        elif isinstance(x, Call):
            args = f",{sp}".join(walk(a) for a in x.args)
            s = f"{walk(x.callee, _UNARY_PREC + 1)}({args})"
        elif isinstance(x, NewExpr):
            s = f"new {type_text(x.alloc_type)}"
            if x.args is not None:
                s += f"({f',{sp}'.join(walk(a) for a in x.args)})"
        elif isinstance(x, DeleteExpr):
            s = f"delete {walk(x.operand, _UNARY_PREC)}"
        elif isinstance(x, CastExpr):
            s = f"({type_text(x.target_type)}){walk(x.operand, _UNARY_PREC)}"
        elif isinstance(x, ImplicitCast):
            return walk(x.operand, parent_prec)
        else:
            raise AssertionError(f"unprintable expr {type(x).__name__}")
        if _UNARY_PREC < parent_prec and isinstance(x, (Unary, DeleteExpr, CastExpr)):
            s = f"({s})"
        return s

    return walk(e)


class _Printer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.indent = 0

    def emit(self, text: str) -> None:
        self.lines.append("  " * self.indent + text)

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, Block):
            self.emit("{")
            self.indent += 1
            for inner in s.stmts:
                self.stmt(inner)
            self.indent -= 1
            self.emit("}")
        elif isinstance(s, VarDecl):
            self.emit(_var_decl_text(s) + ";")
        elif isinstance(s, ExprStmt):
            self.emit(expr_text(s.expr, compact=False) + ";")
        elif isinstance(s, IfStmt):
            self.emit(f"if ({expr_text(s.cond, compact=False)})")
            self.block_or_stmt(s.then_body)
            if s.else_body is not None:
                self.emit("else")
                self.block_or_stmt(s.else_body)
        elif isinstance(s, WhileStmt):
            self.emit(f"while ({expr_text(s.cond, compact=False)})")
            self.block_or_stmt(s.body)
        elif isinstance(s, ForStmt):
            init = _var_decl_text(s.init) if isinstance(s.init, VarDecl) else (
                expr_text(s.init.expr, compact=False) if isinstance(s.init, ExprStmt) else ""
            )
            cond = expr_text(s.cond, compact=False) if s.cond is not None else ""
            step = expr_text(s.step, compact=False) if s.step is not None else ""
            self.emit(f"for ({init}; {cond}; {step})")
            self.block_or_stmt(s.body)
        elif isinstance(s, ReturnStmt):
            if s.value is None:
                self.emit("return;")
            else:
                self.emit(f"return {expr_text(s.value, compact=False)};")
        elif isinstance(s, AssertStmt):
            self.emit(f"assert({expr_text(s.cond, compact=False)});")
        else:
            raise AssertionError(f"unprintable stmt {type(s).__name__}")

    def block_or_stmt(self, s: Stmt) -> None:
        if isinstance(s, Block):
            self.stmt(s)
        else:
            self.indent += 1
            self.stmt(s)
            self.indent -= 1

    def function(self, fn: FunctionDecl, in_class: bool) -> None:
        head = ""
        if fn.is_friend:
            head += "friend "
        if fn.is_virtual:
            head += "virtual "
        if fn.is_ctor or fn.is_dtor:
            head += fn.name
        else:
            head += f"{type_text(fn.ret)} {fn.name}"
        params = ", ".join(
            type_text(p.ty) + (f" {p.name}" if p.name else "") for p in fn.params
        )
        head += f"({params or 'void'})"
        if fn.is_override:
            head += " override"
        if fn.init_list:
            inits = ", ".join(
                f"{nm}({', '.join(expr_text(a, compact=False) for a in args)})"
                for nm, args, _ in fn.init_list
            )
            head += f" : {inits}"
        if fn.body is None:
            self.emit(head + ";")
        else:
            self.emit(head)
            self.stmt(fn.body)

    def template(self, t: TemplateDecl) -> None:
        parts = []
        for p in t.params:
            s = ("typename " if p.kind == "type" else "int ") + p.name
            if p.default is not None:
                s += " = " + targ_text(p.default)
            parts.append(s)
        self.emit(f"template <{', '.join(parts)}>")
        inner = t.decl
        if t.spec_args is not None:
            assert not t.params
        if isinstance(inner, ClassDecl):
            self.class_decl(inner, spec_args=t.spec_args)
        else:
            if t.spec_args is not None:
                inner = _with_spec_name(inner, t.spec_args)
            self.function(inner, in_class=False)

    def class_decl(self, c: ClassDecl, spec_args=None) -> None:
        head = f"{c.keyword} {c.name}"
        if spec_args is not None:
            head += f"<{', '.join(targ_text(a) for a in spec_args)}>"
        if c.bases:
            head += " : " + ", ".join(
                ("virtual " if b.virtual else "") + "public " + type_text(b.ty)
                for b in c.bases
            )
        self.emit(head)
        self.emit("{")
        self.indent += 1
        self.emit("public:")
        for m in c.members:
            if isinstance(m, VarDecl):
                self.emit(_var_decl_text(m) + ";")
            elif isinstance(m, FunctionDecl):
                self.function(m, in_class=True)
            elif isinstance(m, TemplateDecl):
                self.template(m)
            elif isinstance(m, TypedefDecl):
                self.emit(f"typedef {type_text(m.ty)} {m.name};")
            else:
                raise AssertionError(type(m).__name__)
        self.indent -= 1
        self.emit("};")


def _with_spec_name(fn: FunctionDecl, spec_args) -> FunctionDecl:
    clone = dataclasses.replace(fn) if dataclasses.is_dataclass(fn) else fn
    clone.name = f"{fn.name}<{', '.join(targ_text(a) for a in spec_args)}>"
    return clone


def _var_decl_text(v: VarDecl) -> str:
    t = v.ty
    suffix = ""
    if t.kind == "array":
        n = t.length if t.length is not None else expr_text(t.length_expr)
        suffix = f"[{n}]"
        t = t.inner
    s = f"{type_text(t)} {v.name}{suffix}"
    if v.init is not None:
        s += f" = {expr_text(v.init, compact=False)}"
    elif v.ctor_args is not None:
        s += f"({', '.join(expr_text(a, compact=False) for a in v.ctor_args)})"
    return s


def pretty_print(program: Program) -> str:
    """Emit source that re-parses to a structurally identical tree."""
    pr = _Printer()
    for d in program.decls:
        if isinstance(d, ClassDecl):
            pr.class_decl(d)
        elif isinstance(d, TemplateDecl):
            pr.template(d)
        elif isinstance(d, FunctionDecl):
            pr.function(d, in_class=False)
        elif isinstance(d, VarDecl):
            pr.emit(_var_decl_text(d) + ";")
        elif isinstance(d, TypedefDecl):
            pr.emit(f"typedef {type_text(d.ty)} {d.name};")
        else:
            raise AssertionError(type(d).__name__)
    return "\n".join(pr.lines) + "\n"
