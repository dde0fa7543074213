"""Lowering from the typed, monomorphized AST to the GOTO program.

Structured control flow becomes conditional GOTOs; calls are flattened
through `return_value$n` temporaries; `new`/`delete` become ALLOC/DEALLOC
pseudo-calls bracketing constructor/destructor calls; virtual calls become
vptr-slot dispatch sites.  Constructor lowering splices in base calls,
vptr-slot initialization, and member initialization around the user body;
classes with virtual bases additionally get `$base` subobject variants.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import ast_nodes as A
from .ast_nodes import TypeRef
from .diagnostics import NO_LOC, LoweringError, SourceLoc
from .exprs import (
    AddrVar,
    Bin,
    Const,
    Expr,
    FALSE,
    NULLPTR,
    PtrAdd,
    Sym,
    TRUE,
    Un,
    mk_ite,
    mk_not,
)
from .goto_ir import (
    CalleeAlloc,
    CalleeDealloc,
    CalleeDirect,
    CalleeNondet,
    CalleeVirtual,
    GotoFunction,
    GotoModel,
    Instr,
    LMem,
    LVar,
    Read,
)
from .object_model import (
    DTOR_KEY,
    ObjectModel,
    build_object_model,
    collect_vbases,
    has_virtual_dtor,
    nv_closure,
)
from .sema import World


def flat_ty(t: TypeRef) -> str:
    if t.kind == "int":
        return "int"
    if t.kind == "bool":
        return "bool"
    if t.kind in ("ptr", "ref"):
        return "ptr"
    raise LoweringError(NO_LOC, f"no flat scalar type for {t}")


def _hier_field(world: World, cls: str, name: str) -> tuple[str, TypeRef]:
    info = world.classes[cls]
    fty = info.find_field(name)
    if fty is not None:
        return cls, fty
    for b in world.all_bases(cls):
        fty = world.classes[b].find_field(name)
        if fty is not None:
            return b, fty
    raise LoweringError(NO_LOC, f"field '{name}' not found in '{cls}'")


@dataclass
class _VarInfo:
    kind: str  # 'scalar' | 'object'
    key: str  # SSA base name / object key
    ty: TypeRef


class _Scopes:
    def __init__(self) -> None:
        self.stack: list[dict[str, _VarInfo]] = [{}]
        self.counter: dict[str, int] = {}

    def push(self) -> None:
        self.stack.append({})

    def pop(self) -> dict[str, _VarInfo]:
        return self.stack.pop()

    def declare(self, name: str, info: _VarInfo) -> None:
        self.stack[-1][name] = info

    def unique(self, fn_display: str, name: str) -> str:
        n = self.counter.get(name, 0)
        self.counter[name] = n + 1
        base = f"{fn_display}::{name}"
        return base if n == 0 else f"{base}@{n}"

    def lookup(self, name: str) -> _VarInfo | None:
        for frame in reversed(self.stack):
            if name in frame:
                return frame[name]
        return None


class _FnLower:
    def __init__(self, lw: "_Lowerer", mangled: str, display: str):
        self.lw = lw
        self.world = lw.world
        self.om = lw.om
        self.mangled = mangled
        self.display = display
        self.instrs: list[Instr] = []
        self.labels: dict[int, int] = {}
        self.next_label = 0
        self.scopes = _Scopes()
        self.temp_n = 0
        self.retv_n = 0
        self.dyn_track: dict[str, str] = {}
        self.addr_taken: set[str] = set()
        self.params: list = []
        self.ret_ty: TypeRef | None = None

    # -- emit helpers ------------------------------------------------------

    def emit(self, instr: Instr) -> Instr:
        self.instrs.append(instr)
        return instr

    def new_label(self) -> int:
        self.next_label += 1
        return self.next_label

    def bind_label(self, label: int) -> None:
        self.labels[label] = len(self.instrs)
        self.dyn_track.clear()

    def goto(self, label: int, guard: Expr | None, loc: SourceLoc) -> None:
        i = self.emit(Instr("GOTO", loc, expr=guard))
        i.pending_label = label

    def finish_labels(self) -> None:
        for i in self.instrs:
            if i.kind == "GOTO":
                i.goto_target = self.labels[i.pending_label]

    def fresh_retval(self) -> str:
        self.retv_n += 1
        return "return_value" if self.retv_n == 1 else f"return_value${self.retv_n}"

    def fresh_tmp(self) -> str:
        self.temp_n += 1
        return f"tmp${self.temp_n}"

    def qual(self, name: str) -> str:
        return f"{self.display}::{name}"

    # -- address-taken prepass ------------------------------------------------

    def scan_addr_taken(self, node) -> None:
        import dataclasses as dc

        if node is None or not dc.is_dataclass(node) or isinstance(node, TypeRef):
            return
        if isinstance(node, A.Unary) and node.op == "&" and isinstance(node.operand, A.Ident):
            if getattr(node.operand, "binding", "") == "local":
                self.addr_taken.add(node.operand.name)
        if isinstance(node, A.Call):
            ptys = self.lw.param_types_for_call(node)
            if ptys is not None:
                for a, pty in zip(node.args, ptys):
                    if pty.kind == "ref" and isinstance(a, A.Ident) and getattr(a, "binding", "") == "local":
                        self.addr_taken.add(a.name)
        for f in dc.fields(node):
            v = getattr(node, f.name)
            if isinstance(v, (list, tuple)):
                for x in v:
                    self.scan_addr_taken(x)
            else:
                self.scan_addr_taken(v)

    # -- variables ----------------------------------------------------------------

    def declare_local(self, name: str, ty: TypeRef, loc: SourceLoc) -> _VarInfo:
        key = self.scopes.unique(self.display, name)
        is_object = ty.kind in ("class", "array") or name in self.addr_taken
        info = _VarInfo("object" if is_object else "scalar", key, ty)
        self.scopes.declare(name, info)
        self.emit(
            Instr(
                "DECL",
                loc,
                var=key,
                var_ty=ty,
                is_object=is_object,
                display=name,
            )
        )
        return info

    def lookup_var(self, name: str) -> _VarInfo | None:
        return self.scopes.lookup(name)

    # -- pointer adjustment across class views ---------------------------------------

    def ptr_adjust(self, p: Expr, from_cls: str, to_cls: str, label: str = "") -> Expr:
        """Adjust a from_cls* pointer to the to_cls subobject view."""
        if from_cls == to_cls:
            return p
        layouts = self.om.layouts
        world = self.world
        from_nv = nv_closure(world, from_cls)
        if to_cls in from_nv:
            d = layouts[from_cls].base_offsets[to_cls]
        elif from_cls in nv_closure(world, to_cls):
            d = -layouts[to_cls].base_offsets[from_cls]
        else:
            # target sits behind a virtual base: its offset depends on the
            # most-derived type, so read the dynamic tag and select among
            # candidate layouts
            via = None
            for v in collect_vbases(world, from_cls):
                if to_cls in nv_closure(world, v):
                    via = v
                    break
            if via is None:
                raise LoweringError(NO_LOC, f"no subobject path between {from_cls} and {to_cls}")
            tag = self.read_vptr_tag(p, from_cls)
            delta: Expr | None = None
            for dyn in self.om.dispatch_candidates(world, from_cls):
                d = layouts[dyn].base_offsets[via] - layouts[dyn].base_offsets[from_cls]
                dc = Const(d)
                delta = dc if delta is None else mk_ite(Bin("eq", tag, Const(self.om.tags[dyn])), dc, delta)
            inner = layouts[via].base_offsets[to_cls]
            if inner:
                delta = Bin("add", delta, Const(inner))
            adjusted = PtrAdd(p, delta, cast_label=label)
            return mk_ite(Bin("eq", p, NULLPTR), NULLPTR, adjusted)
        if d == 0:
            return PtrAdd(p, Const(0), cast_label=label) if label else p
        adjusted = PtrAdd(p, Const(d), cast_label=label)
        return mk_ite(Bin("eq", p, NULLPTR), NULLPTR, adjusted)

    def read_vptr_tag(self, p: Expr, view: str) -> Expr:
        off = self.om.layouts[view].vptr_views[view]
        return Read(LMem(p, off, ty="int", display=f"{_pdisp(p)}->vptr${view}", no_check=True))

    # -- expressions ------------------------------------------------------------------

    def lower_expr(self, e: A.Expr) -> Expr:
        if isinstance(e, A.IntLit):
            return Const(e.value)
        if isinstance(e, A.BoolLit):
            return Const(int(e.value), "bool")
        if isinstance(e, A.NullLit):
            return NULLPTR
        if isinstance(e, A.ThisExpr):
            return Sym(self.qual("this"), "ptr")
        if isinstance(e, A.Ident):
            return self.lower_ident(e)
        if isinstance(e, A.Unary):
            return self.lower_unary(e)
        if isinstance(e, A.Binary):
            return self.lower_binary(e)
        if isinstance(e, A.AssignExpr):
            lv = self.lower_lvalue(e.target)
            rhs = self.lower_expr(e.value)
            self.track_assign(e.target, e.value)
            self.emit(Instr("ASSIGN", e.loc, target=lv, rhs=rhs))
            return Read(lv) if isinstance(lv, LMem) else Sym(lv.var, lv.ty)
        if isinstance(e, (A.IndexExpr, A.Member)):
            lv = self.lower_lvalue(e)
            return Read(lv) if isinstance(lv, LMem) else Sym(lv.var, lv.ty)
        if isinstance(e, A.Call):
            return self.lower_call(e)
        if isinstance(e, A.NewExpr):
            return self.lower_new(e)
        if isinstance(e, A.DeleteExpr):
            self.lower_delete(e)
            return Const(0)
        if isinstance(e, A.CastExpr):
            return self.lower_cast(e.operand, e.operand.ty, e.target_type)
        if isinstance(e, A.ImplicitCast):
            return self.lower_implicit_cast(e)
        raise LoweringError(getattr(e, "loc", NO_LOC), f"cannot lower {type(e).__name__}")

    def lower_ident(self, e: A.Ident) -> Expr:
        binding = getattr(e, "binding", "local")
        if binding == "local":
            info = self.lookup_var(e.name)
            assert info is not None, e.name
            if info.kind == "scalar":
                return Sym(info.key, flat_ty(info.ty))
            if info.ty.kind in ("int", "bool", "ptr"):
                return Read(LMem(AddrVar(info.key), 0, ty=flat_ty(info.ty), display=e.name))
            raise LoweringError(e.loc, f"object '{e.name}' used as a value")
        if binding == "member":
            owner, fty = _hier_field(self.world, self.lw.current_class, e.name)
            off = self.om.layouts[self.lw.current_class].own_field_offsets[(owner, e.name)]
            return Read(LMem(Sym(self.qual("this"), "ptr"), off, ty=flat_ty(fty), display=f"this->{e.name}"))
        if binding == "global":
            g = self.world.globals[e.name]
            if g.ty.kind in ("int", "bool", "ptr"):
                return Read(LMem(AddrVar(e.name), 0, ty=flat_ty(g.ty), display=e.name))
            raise LoweringError(e.loc, f"global object '{e.name}' used as a value")
        raise AssertionError(binding)

    def lower_unary(self, e: A.Unary) -> Expr:
        if e.op == "-":
            return Un("neg", self.lower_expr(e.operand))
        if e.op == "!":
            return mk_not(self.lower_expr(e.operand))
        if e.op == "*":
            p = self.lower_expr(e.operand)
            ty = e.operand.ty.inner
            return Read(LMem(p, 0, ty=flat_ty(ty), display=f"*{_pdisp(p)}"))
        if e.op == "&":
            return self.addr_of(e.operand)
        raise AssertionError(e.op)

    def addr_of(self, e: A.Expr) -> Expr:
        lv = self.lower_lvalue(e)
        if isinstance(lv, LVar):
            raise LoweringError(e.loc, f"cannot take the address of non-object '{lv.var}'")
        if lv.index is not None:
            base = PtrAdd(lv.ptr, Const(lv.delta)) if lv.delta else lv.ptr
            return PtrAdd(base, lv.index)
        if lv.delta:
            return PtrAdd(lv.ptr, Const(lv.delta))
        return lv.ptr

    def lower_binary(self, e: A.Binary) -> Expr:
        if e.op in ("&&", "||"):
            # short-circuit via control flow, keeping the IR pure
            tmp = self.qual(self.fresh_tmp())
            self.emit(Instr("DECL", e.loc, var=tmp, var_ty=A.BOOL, display=tmp.rsplit("::", 1)[1]))
            lv = LVar(tmp, "bool")
            a = self.lower_expr(e.left)
            if e.op == "&&":
                self.emit(Instr("ASSIGN", e.loc, target=lv, rhs=FALSE))
                skip = self.new_label()
                self.goto(skip, mk_not(a), e.loc)
                b = self.lower_expr(e.right)
                self.emit(Instr("ASSIGN", e.loc, target=lv, rhs=b))
                self.bind_label(skip)
            else:
                self.emit(Instr("ASSIGN", e.loc, target=lv, rhs=TRUE))
                skip = self.new_label()
                self.goto(skip, a, e.loc)
                b = self.lower_expr(e.right)
                self.emit(Instr("ASSIGN", e.loc, target=lv, rhs=b))
                self.bind_label(skip)
            return Sym(tmp, "bool")
        op_map = {
            "+": "add",
            "-": "sub",
            "*": "mul",
            "/": "div",
            "%": "rem",
            "==": "eq",
            "!=": "ne",
            "<": "lt",
            "<=": "le",
            ">": "gt",
            ">=": "ge",
        }
        return Bin(op_map[e.op], self.lower_expr(e.left), self.lower_expr(e.right))

    def lower_implicit_cast(self, e: A.ImplicitCast) -> Expr:
        if e.kind == "null_to_ptr":
            return NULLPTR
        if e.kind == "to_bool":
            v = self.lower_expr(e.operand)
            if e.operand.ty.kind == "ptr":
                return Bin("ne", v, NULLPTR)
            return Bin("ne", v, Const(0))
        if e.kind == "ptr_up":
            return self.lower_cast(e.operand, e.operand.ty, e.ty)
        raise AssertionError(e.kind)

    def lower_cast(self, operand: A.Expr, from_ty: TypeRef, to_ty: TypeRef) -> Expr:
        v = self.lower_expr(operand)
        if to_ty.kind == "ptr" and from_ty.kind == "ptr":
            a, b = from_ty.inner, to_ty.inner
            if a.kind == "class" and b.kind == "class" and a.name != b.name:
                label = f"({b.name}*)"
                return self.ptr_adjust(v, a.name, b.name, label=label)
            return v
        return v

    # -- lvalues ------------------------------------------------------------------------

    def lower_lvalue(self, e: A.Expr):
        if isinstance(e, A.Ident):
            binding = getattr(e, "binding", "local")
            if binding == "local":
                info = self.lookup_var(e.name)
                assert info is not None
                if info.kind == "scalar":
                    return LVar(info.key, flat_ty(info.ty), display=e.name)
                if info.ty.kind == "array":
                    return LMem(AddrVar(info.key), 0, index=Const(0), ty=flat_ty(info.ty.inner), display=e.name, length=info.ty.length)
                return LMem(AddrVar(info.key), 0, ty=_mem_ty(info.ty), display=e.name)
            if binding == "member":
                owner, fty = _hier_field(self.world, self.lw.current_class, e.name)
                off = self.om.layouts[self.lw.current_class].own_field_offsets[(owner, e.name)]
                return LMem(Sym(self.qual("this"), "ptr"), off, ty=_mem_ty(fty), display=f"this->{e.name}")
            g = self.world.globals[e.name]
            return LMem(AddrVar(e.name), 0, ty=_mem_ty(g.ty), display=e.name)
        if isinstance(e, A.Member):
            return self.member_lvalue(e)
        if isinstance(e, A.IndexExpr):
            return self.index_lvalue(e)
        if isinstance(e, A.Unary) and e.op == "*":
            p = self.lower_expr(e.operand)
            return LMem(p, 0, ty=_mem_ty(e.operand.ty.inner), display=f"*{_pdisp(p)}")
        raise LoweringError(getattr(e, "loc", NO_LOC), f"not an lvalue: {type(e).__name__}")

    def object_addr(self, e: A.Expr, want_cls: str) -> Expr:
        """Address of a class-typed lvalue, adjusted to the want_cls view."""
        have_cls = e.ty.name if e.ty.kind == "class" else e.ty.inner.name
        if e.ty.kind == "ref":
            info = self.lookup_var(e.name) if isinstance(e, A.Ident) else None
            if isinstance(e, A.Ident) and info is not None and info.kind == "scalar":
                p = Sym(info.key, "ptr")
            else:
                p = self.lower_expr(e)
        else:
            lv = self.lower_lvalue(e)
            assert isinstance(lv, LMem) and lv.index is None
            p = PtrAdd(lv.ptr, Const(lv.delta)) if lv.delta else lv.ptr
        return self.ptr_adjust(p, have_cls, want_cls)

    def member_lvalue(self, e: A.Member) -> LMem:
        recv_cls = getattr(e, "receiver_class")
        owner, fty = _hier_field(self.world, recv_cls, e.name)
        if e.arrow:
            p = self.lower_expr(e.base)
            base_disp = _pdisp(p)
            sep = "->"
        else:
            p = self.object_addr(e.base, recv_cls)
            base_disp = e.base.name if isinstance(e.base, A.Ident) else _pdisp(p)
            sep = "."
        layout = self.om.layouts[recv_cls]
        if owner not in nv_closure(self.world, recv_cls):
            # field lives behind a virtual base: locate it dynamically
            padj = self.ptr_adjust(p, recv_cls, owner)
            off = self.om.layouts[owner].own_field_offsets[(owner, e.name)]
            return LMem(padj, off, ty=_mem_ty(fty), display=f"{base_disp}{sep}{e.name}")
        off = layout.own_field_offsets[(owner, e.name)]
        return LMem(p, off, ty=_mem_ty(fty), display=f"{base_disp}{sep}{e.name}")

    def index_lvalue(self, e: A.IndexExpr) -> LMem:
        idx = self.lower_expr(e.index)
        bty = e.base.ty
        if bty.kind == "array":
            blv = self.lower_lvalue(e.base)
            assert isinstance(blv, LMem)
            return LMem(
                blv.ptr,
                blv.delta,
                index=idx,
                ty=flat_ty(bty.inner),
                display=f"{blv.display or _pdisp(blv.ptr)}[{_short(idx)}]",
                length=bty.length,
            )
        p = self.lower_expr(e.base)
        return LMem(p, 0, index=idx, ty=flat_ty(bty.inner), display=f"{_pdisp(p)}[{_short(idx)}]")

    # -- calls ----------------------------------------------------------------------------

    def lower_args(self, args: list, ptys: list) -> list[Expr]:
        out = []
        for a, pty in zip(args, ptys):
            if pty.kind == "ref":
                if pty.inner.kind == "class":
                    out.append(self.object_addr(a, pty.inner.name))
                else:
                    out.append(self.addr_of(a))
            else:
                out.append(self.lower_expr(a))
        return out

    def call_result(self, ret: TypeRef | None, loc: SourceLoc):
        if ret is None or ret.kind == "void":
            return None, None
        name = self.qual(self.fresh_retval())
        self.emit(Instr("DECL", loc, var=name, var_ty=ret, display=name.rsplit("::", 1)[1]))
        lv = LVar(name, flat_ty(ret), display=name.rsplit("::", 1)[1])
        return lv, Sym(name, flat_ty(ret))

    def lower_call(self, e: A.Call) -> Expr:
        d = e.dispatch
        if d[0] == "nondet":
            lv, result = self.call_result(A.INT, e.loc)
            self.emit(Instr("CALL", e.loc, lhs=lv, callee=CalleeNondet(), args=[]))
            return result
        if d[0] == "free":
            fn = self.world.functions[d[1]]
            args = self.lower_args(e.args, [p.ty for p in fn.params])
            lv, result = self.call_result(fn.ret, e.loc)
            self.emit(Instr("CALL", e.loc, lhs=lv, callee=CalleeDirect(d[1]), args=args))
            return result if result is not None else Const(0)
        # method calls
        recv, view = self.receiver_for(e)
        if d[0] == "method":
            _, mangled, static_cls, impl_cls = d
            fn = self.world.functions[mangled]
            args = self.lower_args(e.args, [p.ty for p in fn.params])
            recv_adj = self.ptr_adjust(recv, view, impl_cls)
            lv, result = self.call_result(fn.ret, e.loc)
            self.emit(Instr("CALL", e.loc, lhs=lv, callee=CalleeDirect(mangled), args=[recv_adj] + args))
            return result if result is not None else Const(0)
        assert d[0] == "virtual"
        _, static_cls, sig_key = d
        mi = self._sig_method(static_cls, sig_key)
        args = self.lower_args(e.args, mi.param_tys)
        view = self.dispatch_view(static_cls, sig_key)
        if view != static_cls:
            recv = self.ptr_adjust(recv, static_cls, view)
        index = self.om.method_lists[view].index(sig_key)
        known = self.known_dyn_of(e)
        lv, result = self.call_result(mi.ret, e.loc)
        callee = CalleeVirtual(view, sig_key, index, mi.name, known_dyn=known)
        self.emit(Instr("CALL", e.loc, lhs=lv, callee=callee, args=[recv] + args))
        return result if result is not None else Const(0)

    def dispatch_view(self, static_cls: str, sig_key) -> str:
        """Class whose vtable carries the entry for sig_key."""
        if sig_key in self.om.method_lists[static_cls]:
            return static_cls
        for b in self.world.all_bases(static_cls):
            if sig_key in self.om.method_lists[b]:
                return b
        raise LoweringError(NO_LOC, f"no vtable entry for {sig_key} from {static_cls}")

    def _sig_method(self, cls: str, sig_key):
        return self.world.final_overrider(cls, sig_key)

    def receiver_for(self, e: A.Call) -> tuple[Expr, str]:
        if getattr(e, "implicit_this", False):
            return Sym(self.qual("this"), "ptr"), self.lw.current_class
        callee = e.callee
        assert isinstance(callee, A.Member)
        bty = callee.base.ty
        if callee.arrow:
            return self.lower_expr(callee.base), bty.inner.name
        cls = bty.name if bty.kind == "class" else bty.inner.name
        return self.object_addr(callee.base, cls), cls

    def known_dyn_of(self, e: A.Call) -> str:
        callee = e.callee
        if isinstance(callee, A.Member) and callee.arrow and isinstance(callee.base, A.Ident):
            return self.dyn_track.get(callee.base.name, "")
        return ""

    def track_assign(self, target: A.Expr, value: A.Expr) -> None:
        if not isinstance(target, A.Ident):
            return
        v = value
        while isinstance(v, (A.ImplicitCast, A.CastExpr)):
            v = v.operand
        if isinstance(v, A.NewExpr) and v.alloc_type.kind == "class":
            self.dyn_track[target.name] = v.alloc_type.name
        elif isinstance(v, A.Ident) and v.name in self.dyn_track:
            self.dyn_track[target.name] = self.dyn_track[v.name]
        else:
            self.dyn_track.pop(target.name, None)

    def lower_new(self, e: A.NewExpr) -> Expr:
        t = e.alloc_type
        tmp = self.qual(self.fresh_tmp())
        self.emit(Instr("DECL", e.loc, var=tmp, var_ty=A.ptr_to(t), display=tmp.rsplit("::", 1)[1]))
        lv = LVar(tmp, "ptr", display=tmp.rsplit("::", 1)[1])
        if t.kind == "class":
            size = self.om.layouts[t.name].size
            self.emit(Instr("CALL", e.loc, lhs=lv, callee=CalleeAlloc(t.name, max(size, 1)), args=[]))
            ctor = self.world.functions[e.ctor_mangled]
            args = self.lower_args(e.args or [], [p.ty for p in ctor.params])
            self.emit(
                Instr("CALL", e.loc, lhs=None, callee=CalleeDirect(e.ctor_mangled), args=[Sym(tmp, "ptr")] + args)
            )
        else:
            self.emit(Instr("CALL", e.loc, lhs=lv, callee=CalleeAlloc(t.kind, 1), args=[]))
            if e.args:
                val = self.lower_expr(e.args[0])
                self.emit(
                    Instr("ASSIGN", e.loc, target=LMem(Sym(tmp, "ptr"), 0, ty=flat_ty(t), display=f"*{tmp.rsplit('::',1)[1]}"), rhs=val)
                )
        return Sym(tmp, "ptr")

    def lower_delete(self, e: A.DeleteExpr) -> None:
        p = self.lower_expr(e.operand)
        t = e.operand.ty.inner
        if t.kind == "class":
            cls = t.name
            virt = has_virtual_dtor(self.world, cls)
            if virt:
                index = self.om.method_lists[cls].index(DTOR_KEY)
                known = ""
                if isinstance(e.operand, A.Ident):
                    known = self.dyn_track.get(e.operand.name, "")
                callee = CalleeVirtual(cls, DTOR_KEY, index, "~" + cls, known_dyn=known)
                self.emit(Instr("CALL", e.loc, lhs=None, callee=callee, args=[p]))
            else:
                dtor = self.world.classes[cls].dtor
                self.emit(Instr("CALL", e.loc, lhs=None, callee=CalleeDirect(dtor.mangled), args=[p]))
            self.emit(
                Instr("CALL", e.loc, lhs=None, callee=CalleeDealloc(static_cls=cls, dtor_virtual=virt), args=[p])
            )
        else:
            self.emit(Instr("CALL", e.loc, lhs=None, callee=CalleeDealloc(), args=[p]))

    # -- statements ---------------------------------------------------------------------------

    def lower_stmt(self, s: A.Stmt) -> None:
        if isinstance(s, A.Block):
            self.scopes.push()
            for inner in s.stmts:
                self.lower_stmt(inner)
            self.close_scope(s.loc)
            return
        if isinstance(s, A.VarDecl):
            self.lower_vardecl(s)
            return
        if isinstance(s, A.ExprStmt):
            self.lower_expr(s.expr)
            return
        if isinstance(s, A.IfStmt):
            cond = self.lower_expr(s.cond)
            else_l, end_l = self.new_label(), self.new_label()
            self.goto(else_l, mk_not(cond), s.loc)
            self.lower_stmt(s.then_body)
            if s.else_body is not None:
                self.goto(end_l, None, s.loc)
                self.bind_label(else_l)
                self.lower_stmt(s.else_body)
                self.bind_label(end_l)
            else:
                self.bind_label(else_l)
            return
        if isinstance(s, A.WhileStmt):
            # entry check, then a conditional backward edge carrying the
            # re-evaluated condition (the shape loop unwinding expects)
            body_l, exit_l = self.new_label(), self.new_label()
            cond = self.lower_expr(s.cond)
            self.goto(exit_l, mk_not(cond), s.loc)
            self.bind_label(body_l)
            self.lower_stmt(s.body)
            cond2 = self.lower_expr(s.cond)
            self.goto(body_l, cond2, s.loc)
            self.bind_label(exit_l)
            return
        if isinstance(s, A.ForStmt):
            self.scopes.push()
            if s.init is not None:
                self.lower_stmt(s.init)
            body_l, exit_l = self.new_label(), self.new_label()
            if s.cond is not None:
                cond = self.lower_expr(s.cond)
                self.goto(exit_l, mk_not(cond), s.loc)
            self.bind_label(body_l)
            self.lower_stmt(s.body)
            if s.step is not None:
                self.lower_expr(s.step)
            if s.cond is not None:
                cond2 = self.lower_expr(s.cond)
                self.goto(body_l, cond2, s.loc)
            else:
                self.goto(body_l, None, s.loc)
            self.bind_label(exit_l)
            self.close_scope(s.loc)
            return
        if isinstance(s, A.ReturnStmt):
            v = self.lower_expr(s.value) if s.value is not None else None
            self.emit(Instr("RETURN", s.loc, value=v))
            return
        if isinstance(s, A.AssertStmt):
            cond = self.lower_expr(s.cond)
            self.emit(Instr("ASSERT", s.loc, expr=cond, desc=s.text))
            return
        raise LoweringError(s.loc, f"cannot lower {type(s).__name__}")

    def close_scope(self, loc: SourceLoc) -> None:
        frame = self.scopes.pop()
        for name, info in reversed(list(frame.items())):
            if info.kind == "object":
                self.emit(Instr("DEAD", loc, var=info.key, display=name))

    def lower_vardecl(self, s: A.VarDecl) -> None:
        info = self.declare_local(s.name, s.ty, s.loc)
        if s.ty.kind == "class":
            ctor = self.world.functions[s.ctor_mangled]
            args = self.lower_args(s.ctor_args or [], [p.ty for p in ctor.params])
            self.emit(
                Instr("CALL", s.loc, lhs=None, callee=CalleeDirect(s.ctor_mangled), args=[AddrVar(info.key)] + args)
            )
            return
        if s.init is not None:
            rhs = self.lower_expr(s.init)
            if info.kind == "scalar":
                self.emit(Instr("ASSIGN", s.loc, target=LVar(info.key, flat_ty(s.ty), display=s.name), rhs=rhs))
            else:
                self.emit(
                    Instr("ASSIGN", s.loc, target=LMem(AddrVar(info.key), 0, ty=flat_ty(s.ty), display=s.name), rhs=rhs)
                )
            self.track_assign(A.Ident(name=s.name, loc=s.loc), s.init)


def _mem_ty(t: TypeRef) -> str:
    if t.kind in ("int", "bool", "ptr"):
        return flat_ty(t)
    return "int"  # aggregate lvalues; element reads go through typed LMems


def _pdisp(p: Expr) -> str:
    if isinstance(p, Sym):
        n = p.name
        return n.rsplit("::", 1)[1] if "::" in n else n
    if isinstance(p, AddrVar):
        n = p.var
        base = n.rsplit("::", 1)[1] if "::" in n else n
        return f"&{base}"
    if isinstance(p, PtrAdd) and p.cast_label:
        return f"{p.cast_label}{_pdisp(p.p)}"
    return "ptr"


def _short(e: Expr) -> str:
    from .exprs import render

    return render(e)


# ---------------------------------------------------------------------------
# Function-level drivers
# ---------------------------------------------------------------------------


class _Lowerer:
    def __init__(self, program: A.Program):
        self.program = program
        self.world: World = program.world
        self.om: ObjectModel = build_object_model(program)
        self.model = GotoModel(world=self.world, om=self.om)
        self.current_class: str | None = None

    def param_types_for_call(self, call: A.Call):
        d = getattr(call, "dispatch", None)
        if d is None:
            return None
        if d[0] == "free":
            return [p.ty for p in self.world.functions[d[1]].params]
        if d[0] == "method":
            return [p.ty for p in self.world.functions[d[1]].params]
        if d[0] == "virtual":
            return self.world.final_overrider(d[1], d[2]).param_tys
        return None

    def run(self) -> GotoModel:
        w = self.world
        self.lower_global_init()
        for mangled, fn in list(w.functions.items()):
            if fn.is_ctor:
                self.lower_ctor(fn, base_variant=False)
                if self._needs_base_variant(fn.owner):
                    self.lower_ctor(fn, base_variant=True)
            elif fn.is_dtor:
                self.lower_dtor(fn, base_variant=False)
                if self._needs_base_variant(fn.owner):
                    self.lower_dtor(fn, base_variant=True)
            else:
                self.lower_plain(fn)
        self.lower_thunks()
        self.model.globals = [(name, w.globals[name].ty) for name in w.global_order]
        self.model.validate()
        return self.model

    def _needs_base_variant(self, cls: str) -> bool:
        return bool(collect_vbases(self.world, cls))

    def _new_fn(self, mangled: str, display: str, params: list, ret_ty) -> _FnLower:
        fl = _FnLower(self, mangled, display)
        fl.params = params
        fl.ret_ty = ret_ty
        return fl

    def _finish(self, fl: _FnLower, implicit_ret: Expr | None, loc) -> GotoFunction:
        if not fl.instrs or fl.instrs[-1].kind != "RETURN":
            self.emit_implicit_return(fl, implicit_ret, loc)
        fl.emit(Instr("END_FUNCTION", loc))
        fl.finish_labels()
        fn = GotoFunction(
            name=fl.mangled,
            display_name=fl.display,
            params=fl.params,
            ret_ty=fl.ret_ty,
            instrs=fl.instrs,
        )
        self.model.functions[fl.mangled] = fn
        return fn

    def emit_implicit_return(self, fl: _FnLower, value: Expr | None, loc) -> None:
        fl.emit(Instr("RETURN", loc, value=value))

    # -- globals -----------------------------------------------------------

    def lower_global_init(self) -> None:
        w = self.world
        fl = self._new_fn("__global_init", "__global_init", [], None)
        for name in w.global_order:
            g = w.globals[name]
            if g.ty.kind == "class":
                ctor = w.functions[g.ctor_mangled]
                args = fl.lower_args(g.ctor_args or [], [p.ty for p in ctor.params])
                fl.emit(Instr("CALL", g.loc, lhs=None, callee=CalleeDirect(g.ctor_mangled), args=[AddrVar(name)] + args))
            elif g.init is not None:
                rhs = fl.lower_expr(g.init)
                fl.emit(Instr("ASSIGN", g.loc, target=LMem(AddrVar(name), 0, ty=flat_ty(g.ty), display=name), rhs=rhs))
        self._finish(fl, None, self.program.loc)

    # -- plain functions and methods ------------------------------------------

    def lower_plain(self, fn: A.FunctionDecl) -> None:
        display = fn.name if fn.owner is None else f"{fn.owner}::{fn.name}"
        params, fl = self._fn_with_params(fn, display)
        self.current_class = fn.owner
        fl.scan_addr_taken(fn.body)
        self._bind_params(fl, fn)
        fl.scopes.push()
        for s in fn.body.stmts:
            fl.lower_stmt(s)
        fl.close_scope(fn.loc)
        implicit = Const(0) if fn.name == "main" else None
        if implicit is None and fn.ret is not None and fn.ret.kind != "void":
            implicit = Sym(fl.qual("$undef_return"), flat_ty(fn.ret))
        self._finish(fl, implicit, fn.loc)
        self.current_class = None

    def _fn_with_params(self, fn: A.FunctionDecl, display: str):
        params = []
        if fn.owner is not None:
            params.append((f"{display}::this", "ptr", A.ptr_to(A.class_type(fn.owner))))
        for p in fn.params:
            params.append((f"{display}::{p.name or '$unnamed'}", flat_ty(p.ty), p.ty))
        fl = self._new_fn(fn.mangled, display, params, fn.ret)
        return params, fl

    def _bind_params(self, fl: _FnLower, fn: A.FunctionDecl) -> None:
        if fn.owner is not None:
            fl.scopes.declare("this", _VarInfo("scalar", fl.qual("this"), A.ptr_to(A.class_type(fn.owner))))
        for p in fn.params:
            if p.name:
                fl.scopes.declare(p.name, _VarInfo("scalar", fl.qual(p.name), p.ty))

    # -- constructors ------------------------------------------------------------

    def ctor_names(self, ctor: A.FunctionDecl, base_variant: bool) -> str:
        if not base_variant:
            return ctor.mangled
        return ctor.mangled.replace("(", "$base(", 1)

    def lower_ctor(self, ctor: A.FunctionDecl, base_variant: bool) -> None:
        cls = ctor.owner
        info = self.world.classes[cls]
        layout = self.om.layouts[cls]
        display = f"{cls}::{cls}" + ("$base" if base_variant else "")
        mangled = self.ctor_names(ctor, base_variant)
        params, fl = self._fn_with_params_named(ctor, display, mangled)
        self.current_class = cls
        fl.scan_addr_taken(ctor.body)
        self._bind_params(fl, ctor)
        this = Sym(fl.qual("this"), "ptr")
        base_inits = {b: (args, tgt) for b, args, tgt, _ in getattr(ctor, "base_inits", [])}
        loc = ctor.loc
        synth_copy = getattr(ctor, "is_copy_ctor", False) and ctor.synthesized
        other = Sym(fl.qual("other"), "ptr") if synth_copy else None
        # virtual bases first (complete-object constructor only)
        if not base_variant:
            for v in layout.vbases:
                off = layout.base_offsets[v]
                if synth_copy:
                    self._emit_base_copy(fl, v, off, this, other, loc)
                else:
                    args_nodes, tgt = base_inits.get(v, ([], None))
                    self._emit_base_ctor(fl, v, off, args_nodes, tgt, this, loc)
        # direct non-virtual bases, declaration order
        for b, virt in info.bases:
            if virt:
                continue
            off = layout.base_offsets[b]
            if synth_copy:
                self._emit_base_copy(fl, b, off, this, other, loc)
            else:
                args_nodes, tgt = base_inits.get(b, ([], None))
                self._emit_base_ctor(fl, b, off, args_nodes, tgt, this, loc)
        # vptr initialization (after base constructor calls)
        inits = getattr(ctor, "vptr_inits_base" if base_variant else "vptr_inits", [])
        for off, vtname, introducer in inits:
            tag = self.om.tags[cls]
            fl.emit(
                Instr(
                    "ASSIGN",
                    loc,
                    target=LMem(this, off, ty="int", display=f"this->vptr${introducer}"),
                    rhs=Const(tag, "int", label=vtname),
                )
            )
        # member initialization
        if getattr(ctor, "is_copy_ctor", False) and ctor.synthesized:
            self._emit_copy_body(fl, ctor, cls, layout, this, loc)
        else:
            member_inits = {nm: (args, tgt) for nm, args, tgt, _ in getattr(ctor, "member_inits", [])}
            for fname, fty in info.fields:
                off = layout.own_field_offsets[(cls, fname)]
                if fname in member_inits:
                    args_nodes, tgt = member_inits[fname]
                    if fty.kind == "class":
                        ctor_fn = self.world.functions[tgt]
                        args = fl.lower_args(args_nodes, [p.ty for p in ctor_fn.params])
                        recv = PtrAdd(this, Const(off)) if off else this
                        fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(tgt), args=[recv] + args))
                    else:
                        rhs = fl.lower_expr(args_nodes[0])
                        fl.emit(
                            Instr("ASSIGN", loc, target=LMem(this, off, ty=flat_ty(fty), display=f"this->{fname}"), rhs=rhs)
                        )
                elif fty.kind == "class":
                    default = self._default_ctor_of(fty.name, loc)
                    recv = PtrAdd(this, Const(off)) if off else this
                    fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(default), args=[recv]))
            # synthesized base call arguments were validated by sema; scalars
            # without initializers stay indeterminate
        fl.scopes.push()
        for s in ctor.body.stmts:
            fl.lower_stmt(s)
        fl.close_scope(loc)
        self._finish(fl, None, loc)
        self.current_class = None

    def _fn_with_params_named(self, fn: A.FunctionDecl, display: str, mangled: str):
        params = [(f"{display}::this", "ptr", A.ptr_to(A.class_type(fn.owner)))]
        for p in fn.params:
            params.append((f"{display}::{p.name or '$unnamed'}", flat_ty(p.ty), p.ty))
        fl = self._new_fn(mangled, display, params, None)
        return params, fl

    def _default_ctor_of(self, cls: str, loc) -> str:
        info = self.world.classes[cls]
        for c in info.ctors:
            if not c.params:
                return c.mangled
        raise LoweringError(loc, f"class '{cls}' has no default constructor")

    def _copy_ctor_of(self, cls: str, loc) -> str:
        info = self.world.classes[cls]
        for c in info.ctors:
            if len(c.params) == 1 and c.params[0].ty.kind == "ref" and c.params[0].ty.inner.name == cls:
                return c.mangled
        raise LoweringError(loc, f"class '{cls}' has no copy constructor")

    def _emit_base_ctor(self, fl: _FnLower, base: str, off: int, args_nodes, tgt, this, loc) -> None:
        if tgt is None:
            tgt = self._default_ctor_of(base, loc)
        if self._needs_base_variant(base):
            tgt = tgt.replace("(", "$base(", 1)
        ctor_fn_name = tgt.replace("$base(", "(", 1)
        ctor_fn = self.world.functions[ctor_fn_name]
        args = fl.lower_args(args_nodes, [p.ty for p in ctor_fn.params])
        recv = PtrAdd(this, Const(off)) if off else this
        fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(tgt), args=[recv] + args))

    def _emit_base_copy(self, fl: _FnLower, base: str, off: int, this, other, loc) -> None:
        copy = self._copy_ctor_of(base, loc)
        if self._needs_base_variant(base):
            copy = copy.replace("(", "$base(", 1)
        fl.emit(
            Instr(
                "CALL",
                loc,
                lhs=None,
                callee=CalleeDirect(copy),
                args=[PtrAdd(this, Const(off)) if off else this, PtrAdd(other, Const(off)) if off else other],
            )
        )

    def _emit_copy_body(self, fl: _FnLower, ctor, cls, layout, this, loc) -> None:
        other = Sym(fl.qual("other"), "ptr")
        info = self.world.classes[cls]
        for fname, fty in info.fields:
            off = layout.own_field_offsets[(cls, fname)]
            if fty.kind == "class":
                copy = self._copy_ctor_of(fty.name, loc)
                fl.emit(
                    Instr(
                        "CALL",
                        loc,
                        lhs=None,
                        callee=CalleeDirect(copy),
                        args=[PtrAdd(this, Const(off)), PtrAdd(other, Const(off))],
                    )
                )
            else:
                rhs = Read(LMem(other, off, ty=flat_ty(fty), display=f"other->{fname}"))
                fl.emit(Instr("ASSIGN", loc, target=LMem(this, off, ty=flat_ty(fty), display=f"this->{fname}"), rhs=rhs))

    # -- destructors ----------------------------------------------------------------

    def lower_dtor(self, dtor: A.FunctionDecl, base_variant: bool) -> None:
        cls = dtor.owner
        info = self.world.classes[cls]
        layout = self.om.layouts[cls]
        display = f"{cls}::~{cls}" + ("$base" if base_variant else "")
        mangled = dtor.mangled if not base_variant else dtor.mangled.replace("(", "$base(", 1)
        params = [(f"{display}::this", "ptr", A.ptr_to(A.class_type(cls)))]
        fl = self._new_fn(mangled, display, params, None)
        self.current_class = cls
        fl.scan_addr_taken(dtor.body)
        fl.scopes.declare("this", _VarInfo("scalar", fl.qual("this"), A.ptr_to(A.class_type(cls))))
        this = Sym(fl.qual("this"), "ptr")
        loc = dtor.loc
        inits = getattr(dtor, "vptr_inits_base" if base_variant else "vptr_inits", [])
        for off, vtname, introducer in inits:
            fl.emit(
                Instr(
                    "ASSIGN",
                    loc,
                    target=LMem(this, off, ty="int", display=f"this->vptr${introducer}"),
                    rhs=Const(self.om.tags[cls], "int", label=vtname),
                )
            )
        fl.scopes.push()
        for s in dtor.body.stmts:
            fl.lower_stmt(s)
        fl.close_scope(loc)
        # member destructors, reverse declaration order
        for fname, fty in reversed(info.fields):
            if fty.kind == "class":
                off = layout.own_field_offsets[(cls, fname)]
                target = self.world.classes[fty.name].dtor.mangled
                if self._needs_base_variant(fty.name):
                    pass  # member complete objects destroy their own vbases
                fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(target), args=[PtrAdd(this, Const(off)) if off else this]))
        # non-virtual base destructors, reverse order
        for b, virt in reversed(info.bases):
            if virt:
                continue
            target = self.world.classes[b].dtor.mangled
            if self._needs_base_variant(b):
                target = target.replace("(", "$base(", 1)
            boff = layout.base_offsets[b]
            fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(target), args=[PtrAdd(this, Const(boff)) if boff else this]))
        if not base_variant:
            for v in reversed(layout.vbases):
                target = self.world.classes[v].dtor.mangled
                if self._needs_base_variant(v):
                    target = target.replace("(", "$base(", 1)
                voff = layout.base_offsets[v]
                fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(target), args=[PtrAdd(this, Const(voff)) if voff else this]))
        self._finish(fl, None, loc)
        self.current_class = None

    # -- thunks --------------------------------------------------------------------------

    def lower_thunks(self) -> None:
        for name, th in self.om.thunks.items():
            target_fn = self.world.functions[th.target]
            display = name
            params = [(f"{display}::this", "ptr", A.ptr_to(A.class_type(th.view)))]
            for p in target_fn.params:
                params.append((f"{display}::{p.name or '$unnamed'}", flat_ty(p.ty), p.ty))
            ret = target_fn.ret if not (target_fn.is_ctor or target_fn.is_dtor) else None
            fl = self._new_fn(name, display, params, ret)
            this = Sym(fl.qual("this"), "ptr")
            recv = PtrAdd(this, Const(th.delta), cast_label=f"({th.target_cls}*)")
            args = [recv] + [Sym(nm, t) for nm, t, _ in params[1:]]
            loc = target_fn.loc
            if ret is not None and ret.kind != "void":
                rv = fl.qual("return_value")
                fl.emit(Instr("DECL", loc, var=rv, var_ty=ret, display="return_value"))
                lv = LVar(rv, flat_ty(ret), display="return_value")
                fl.emit(Instr("CALL", loc, lhs=lv, callee=CalleeDirect(th.target), args=args))
                fl.emit(Instr("RETURN", loc, value=Sym(rv, flat_ty(ret))))
            else:
                fl.emit(Instr("CALL", loc, lhs=None, callee=CalleeDirect(th.target), args=args))
                fl.emit(Instr("RETURN", loc))
            self._finish(fl, None, loc)


def lower(program: A.Program) -> GotoModel:
    """Lower a monomorphized, typed program to its GOTO model."""
    return _Lowerer(program).run()
