"""GOTO program representation: flat instruction lists over a symbol table."""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast_nodes import TypeRef
from .diagnostics import SourceLoc
from .exprs import Expr, render

# -- lvalues -----------------------------------------------------------------


@dataclass(frozen=True)
class LVar:
    """Scalar variable (never address-taken) addressed by name."""

    var: str
    ty: str = "int"
    display: str = ""

    def text(self) -> str:
        return self.display or self.var


@dataclass(frozen=True)
class LMem:
    """Memory slot: *(ptr + delta [+ index]); index implies array access."""

    ptr: Expr
    delta: int = 0
    index: Expr | None = None
    ty: str = "int"
    display: str = ""
    length: int = 0  # array length for bounds checks (index accesses)
    no_check: bool = False  # vptr tag reads: a dominating access already checks

    def text(self) -> str:
        if self.display:
            return self.display
        s = f"*({render(self.ptr)} + {self.delta})"
        if self.index is not None:
            s += f"[{render(self.index)}]"
        return s


@dataclass(frozen=True)
class Read(Expr):
    """Rvalue read of a memory slot (GOTO level; eliminated in SSA)."""

    lv: LMem

    @property
    def ty(self) -> str:
        return self.lv.ty


# -- call targets --------------------------------------------------------------


@dataclass(frozen=True)
class CalleeDirect:
    name: str  # mangled

    def text(self) -> str:
        n = self.name
        return n[: n.index("(")] if "(" in n else n


@dataclass(frozen=True)
class CalleeVirtual:
    view: str
    sig_key: tuple
    index: int
    display: str  # method name
    known_dyn: str = ""  # locally inferred dynamic type, rendering only

    def text(self) -> str:
        dyn = self.known_dyn or "*"
        return f"{self.view}@{dyn}->{self.display}"


@dataclass(frozen=True)
class CalleeAlloc:
    type_name: str
    size: int
    heap: bool = True

    def text(self) -> str:
        return f"ALLOC({self.type_name}, {self.size})"


@dataclass(frozen=True)
class CalleeDealloc:
    static_cls: str = ""  # pointee class at the delete site ('' for scalars)
    dtor_virtual: bool = False

    def text(self) -> str:
        return "DEALLOC"


@dataclass(frozen=True)
class CalleeNondet:
    def text(self) -> str:
        return "nondet_int"


# -- instructions ----------------------------------------------------------------


@dataclass
class Instr:
    kind: str  # DECL DEAD ASSIGN ASSERT ASSUME GOTO CALL RETURN END_FUNCTION
    loc: SourceLoc
    # DECL/DEAD
    var: str = ""
    var_ty: TypeRef | None = None
    is_object: bool = False
    display: str = ""
    # ASSIGN
    target: object = None  # LVar | LMem
    rhs: Expr | None = None
    # ASSERT/ASSUME/GOTO guard
    expr: Expr | None = None
    desc: str = ""
    # GOTO
    goto_target: int = -1
    # CALL
    lhs: object = None
    callee: object = None
    args: list = field(default_factory=list)
    # RETURN
    value: Expr | None = None


@dataclass
class GotoFunction:
    name: str  # mangled
    display_name: str  # source-level name for reports
    params: list = field(default_factory=list)  # (name, ty-str, TypeRef)
    ret_ty: TypeRef | None = None
    instrs: list = field(default_factory=list)
    object_vars: set = field(default_factory=set)


@dataclass
class GotoModel:
    functions: dict = field(default_factory=dict)  # mangled -> GotoFunction
    globals: list = field(default_factory=list)  # (name, TypeRef)
    entry: str = "main()"
    init_fn: str = "__global_init"
    world: object = None  # sema.World
    om: object = None  # object_model.ObjectModel

    def validate(self) -> None:
        for fn in self.functions.values():
            ins = fn.instrs
            assert ins and ins[-1].kind == "END_FUNCTION", f"{fn.name}: missing END_FUNCTION"
            assert sum(1 for i in ins if i.kind == "END_FUNCTION") == 1, f"{fn.name}: several END_FUNCTION"
            for i, instr in enumerate(ins):
                if instr.kind == "GOTO":
                    assert 0 <= instr.goto_target < len(ins), f"{fn.name}@{i}: goto target out of range"


# -- dump ----------------------------------------------------------------------------


def _instr_text(instr: Instr) -> str:
    k = instr.kind
    if k == "DECL":
        return f"DECL {instr.display or instr.var} : {instr.var_ty}"
    if k == "DEAD":
        return f"DEAD {instr.display or instr.var}"
    if k == "ASSIGN":
        return f"{instr.target.text()} = {render(instr.rhs)}"
    if k == "ASSERT":
        return f"assert({render(instr.expr)})"
    if k == "ASSUME":
        return f"assume({render(instr.expr)})"
    if k == "GOTO":
        if instr.expr is None:
            return f"GOTO {instr.goto_target}"
        return f"IF {render(instr.expr)} GOTO {instr.goto_target}"
    if k == "CALL":
        args = ", ".join(render(a) for a in instr.args)
        if isinstance(instr.callee, CalleeVirtual):
            recv = render(instr.args[0])
            rest = ", ".join(render(a) for a in instr.args)
            call = f"*{recv}->{instr.callee.text()}({rest})"
        elif isinstance(instr.callee, CalleeAlloc):
            call = instr.callee.text()
        else:
            call = f"{instr.callee.text()}({args})"
        if instr.lhs is not None:
            return f"{instr.lhs.text()} = {call}"
        return call
    if k == "RETURN":
        if instr.value is None:
            return "RETURN"
        return f"RETURN: {render(instr.value)}"
    if k == "END_FUNCTION":
        return "END_FUNCTION"
    raise AssertionError(k)


def dump_goto(model: GotoModel) -> str:
    """Deterministic text dump of every GOTO function (--show-goto-functions)."""
    blocks = []
    for name, fn in model.functions.items():
        lines = [f"{name}:"]
        for i, instr in enumerate(fn.instrs):
            lines.append(f"  {i:3d}: {_instr_text(instr)}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
