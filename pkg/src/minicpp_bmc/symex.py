"""Bounded symbolic execution: GOTO model -> guarded single-assignment system.

One merged pass per function (no path enumeration): forward branches
suspend a guarded state at their target and the main walk folds suspended
states back in with guard-selected merge symbols.  Conditional backward
edges are the loop back edges; each may be taken k-1 times per inlined
frame, after which an unwinding assumption (and optional assertion) cuts
the loop.  Calls are inlined with fresh SSA frames; recursion depth is
bounded by the same k.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import SourceLoc, SymexError
from .exprs import (
    AddrVar,
    Bin,
    Const,
    Expr,
    FALSE,
    Ite,
    MAX_OBJECTS,
    NoOverflow,
    PtrAdd,
    Select,
    Store,
    Sym,
    TRUE,
    Un,
    ZeroArr,
    encode_ptr,
    fold,
    mk_and,
    mk_ite,
    mk_not,
    mk_or,
    ptr_obj,
    ptr_off,
)
from .goto_ir import (
    CalleeAlloc,
    CalleeDealloc,
    CalleeDirect,
    CalleeNondet,
    CalleeVirtual,
    GotoModel,
    LMem,
    LVar,
    Read,
)

INT_MIN = -(2**31)


@dataclass
class UnwindConfig:
    k: int = 10
    unwinding_assertions: bool = False
    overflow: bool = False
    bounds: bool = False
    memory: bool = False
    simplify: bool = True  # fold equation rhs / claims through definitions

    def __post_init__(self) -> None:
        assert self.k >= 1


@dataclass
class Equation:
    guard: Expr
    lhs: str
    rhs: Expr
    ty: str
    loc: SourceLoc


@dataclass
class Property:
    guard: Expr
    claim: Expr
    kind: str  # assertion overflow bounds pointer-validity deallocation unwinding
    description: str
    loc: SourceLoc
    function: str

    @property
    def key(self):
        return (self.kind, self.loc.file, self.loc.line, self.loc.column, self.description)


@dataclass
class NondetRecord:
    name: str
    guard: Expr


@dataclass
class SsaSystem:
    equations: list = field(default_factory=list)
    properties: list = field(default_factory=list)
    nondets: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    defs: dict = field(default_factory=dict)
    sym_tys: dict = field(default_factory=dict)
    model: GotoModel | None = None

    def validate_single_assignment(self) -> None:
        seen = set()
        for eq in self.equations:
            assert eq.lhs not in seen, f"SSA symbol {eq.lhs} defined twice"
            seen.add(eq.lhs)


@dataclass
class SymObject:
    oid: int
    kind: str  # 'slots' | 'array'
    name: str
    cls: str | None
    size: int
    heap: bool
    slots: list = field(default_factory=list)  # Expr | None per slot
    arr: Expr | None = None
    valid: Expr = TRUE
    slot_names: list = field(default_factory=list)
    writes: int = 0


class _Frame:
    def __init__(self, guard: Expr):
        self.guard = guard
        self.env: dict[str, Expr | None] = {}
        self.objbind: dict[str, int] = {}
        self.pending: dict[int, list] = {}
        self.unwind: dict[int, int] = {}
        self.ret_parts: list = []

    def snapshot(self):
        return dict(self.env), dict(self.objbind)


class Symex:
    def __init__(self, model: GotoModel, cfg: UnwindConfig):
        self.model = model
        self.cfg = cfg
        self.world = model.world
        self.om = model.om
        self.sys = SsaSystem(model=model)
        self.ssa_idx: dict[str, int] = {}
        self.objects: dict[int, SymObject] = {}
        self.next_oid = 1
        self.globals: dict[str, int] = {}
        self.active: dict[str, int] = {}
        self.fn_display = ""
        self.dyn_count = 0
        # assumptions do not constrain the formula globally: they weaken the
        # guard of every property recorded after them, so an assertion that
        # fails before an assume(false) is still reported
        self.assume_guard: Expr = TRUE

    # -- naming ----------------------------------------------------------------

    def new_ssa(self, base: str, ty: str) -> str:
        i = self.ssa_idx.get(base, 0) + 1
        self.ssa_idx[base] = i
        name = f"{base}#{i}"
        self.sys.sym_tys[name] = ty
        return name

    def equate(self, guard: Expr, base: str, rhs: Expr, ty: str, loc: SourceLoc) -> Sym:
        name = self.new_ssa(base, ty)
        self.sys.equations.append(Equation(guard, name, self.f(rhs), ty, loc))
        # definitions always fold fully: dispatch and guard pruning need them
        self.sys.defs[name] = self.fd(rhs)
        return Sym(name, ty)

    def fresh_nondet(self, base: str, guard: Expr, ty: str = "int") -> Sym:
        name = self.new_ssa(f"{base}", ty)
        self.sys.nondets.append(NondetRecord(name, guard))
        return Sym(name, ty)

    def assume(self, cond: Expr) -> None:
        self.sys.assumptions.append(cond)
        self.assume_guard = self.fd(mk_and(self.assume_guard, cond))

    def pguard(self, frame) -> Expr:
        return self.fd(mk_and(self.assume_guard, frame.guard))

    def f(self, e: Expr) -> Expr:
        return fold(e, self.sys.defs if self.cfg.simplify else None)

    def fd(self, e: Expr) -> Expr:
        return fold(e, self.sys.defs)

    # -- objects -----------------------------------------------------------------

    def new_object(self, kind: str, name: str, cls: str | None, size: int, heap: bool) -> SymObject:
        oid = self.next_oid
        if oid > MAX_OBJECTS:
            raise SymexError(None, f"allocation limit exceeded ({MAX_OBJECTS} objects)")
        self.next_oid += 1
        obj = SymObject(oid=oid, kind=kind, name=name, cls=cls, size=size, heap=heap)
        if kind == "array":
            obj.arr = ZeroArr()
        else:
            obj.slots = [None] * size
            obj.slot_names = self._slot_names(cls, size, name)
        self.objects[oid] = obj
        return obj

    def _slot_names(self, cls: str | None, size: int, name: str) -> list[str]:
        if cls is None:
            return [name if size == 1 else f"{name}[{i}]" for i in range(size)]
        layout = self.om.layouts[cls]
        return [f"{name}.{s.name}" for s in layout.slots]

    def setup_globals(self) -> None:
        for name, ty in self.model.globals:
            if ty.kind == "class":
                size = max(self.om.layouts[ty.name].size, 1)
                obj = self.new_object("slots", name, ty.name, size, heap=False)
                obj.slots = [Const(0)] * size
            elif ty.kind == "array":
                obj = self.new_object("array", name, None, ty.length, heap=False)
            else:
                obj = self.new_object("slots", name, None, 1, heap=False)
                obj.slots = [Const(0)]
            self.globals[name] = obj.oid

    # -- entry ----------------------------------------------------------------------

    def run(self) -> SsaSystem:
        if self.model.entry not in self.model.functions:
            raise SymexError(None, f"entry function '{self.model.entry}' missing")
        self.setup_globals()
        self.exec_function(self.model.init_fn, [], TRUE)
        self.exec_function(self.model.entry, [], TRUE)
        self.sys.validate_single_assignment()
        return self.sys

    # -- function inlining -------------------------------------------------------------

    def exec_function(self, name: str, args: list[Expr], guard: Expr):
        fn = self.model.functions.get(name)
        if fn is None:
            raise SymexError(None, f"undefined function '{name}'")
        depth = self.active.get(name, 0)
        if depth >= self.cfg.k:
            if self.cfg.unwinding_assertions:
                g = self.fd(mk_and(self.assume_guard, guard))
                self.sys.properties.append(
                    Property(g, mk_not(g), "unwinding", f"recursion unwinding {fn.display_name}", fn.instrs[0].loc, fn.display_name)
                )
            self.assume(self.fd(mk_not(guard)))
            if fn.ret_ty is not None and fn.ret_ty.kind != "void":
                return self.fresh_nondet(f"{fn.display_name}::$cut_return", guard)
            return None
        self.active[name] = depth + 1
        prev_display = self.fn_display
        self.fn_display = fn.display_name
        try:
            return self._exec_body(fn, args, guard)
        finally:
            self.fn_display = prev_display
            self.active[name] = depth

    def _exec_body(self, fn, args: list[Expr], guard: Expr):
        frame = _Frame(guard)
        for (pname, pty, _tref), a in zip(fn.params, args):
            frame.env[pname] = self.equate(frame.guard, pname, a, pty, fn.instrs[0].loc)
        instrs = fn.instrs
        end_idx = len(instrs) - 1
        pc = 0
        while True:
            if pc in frame.pending:
                self._merge_states(frame, frame.pending.pop(pc), instrs[pc].loc)
            g = self.fd(frame.guard)
            frame.guard = g
            if isinstance(g, Const) and not g.value:
                nxt = min((i for i in frame.pending if i >= pc), default=None)
                if nxt is None:
                    break
                pc = nxt
                continue
            instr = instrs[pc]
            k = instr.kind
            if k == "END_FUNCTION":
                break
            if k == "DECL":
                self._exec_decl(frame, instr)
            elif k == "DEAD":
                oid = frame.objbind.get(instr.var)
                if oid is not None:
                    obj = self.objects[oid]
                    obj.valid = self.f(mk_and(obj.valid, mk_not(frame.guard)))
            elif k == "ASSIGN":
                v = self.eval(frame, instr.rhs, instr.loc)
                self.store(frame, instr.target, v, instr.loc)
            elif k == "ASSERT":
                claim = self.eval(frame, instr.expr, instr.loc)
                self.sys.properties.append(
                    Property(self.pguard(frame), self.f(claim), "assertion", instr.desc, instr.loc, self.fn_display)
                )
            elif k == "ASSUME":
                cond = self.eval(frame, instr.expr, instr.loc)
                self.assume(self.fd(mk_or(mk_not(frame.guard), cond)))
            elif k == "GOTO":
                cond = TRUE if instr.expr is None else self.eval(frame, instr.expr, instr.loc)
                cond = self.fd(cond)
                target = instr.goto_target
                if target > pc:
                    taken = self.fd(mk_and(frame.guard, cond))
                    if not (isinstance(taken, Const) and not taken.value):
                        env, objbind = frame.snapshot()
                        frame.pending.setdefault(target, []).append((taken, env, objbind))
                    frame.guard = self.fd(mk_and(frame.guard, mk_not(cond)))
                else:
                    count = frame.unwind.get(pc, 0)
                    taken = self.fd(mk_and(frame.guard, cond))
                    if isinstance(taken, Const) and not taken.value:
                        frame.guard = self.fd(mk_and(frame.guard, mk_not(cond)))
                    elif count < self.cfg.k - 1:
                        frame.unwind[pc] = count + 1
                        # loops nested inside this one get a fresh budget on
                        # every re-entry from the enclosing back edge
                        for inner in [p for p in frame.unwind if target <= p < pc]:
                            del frame.unwind[inner]
                        frame.guard = taken
                        pc = target
                        continue
                    else:
                        # bound reached: the loop must exit here
                        not_taken = self.fd(mk_not(taken))
                        if self.cfg.unwinding_assertions:
                            self.sys.properties.append(
                                Property(self.pguard(frame), not_taken, "unwinding", "unwinding assertion loop", instr.loc, self.fn_display)
                            )
                        self.assume(not_taken)
                        frame.guard = self.fd(mk_and(frame.guard, mk_not(cond)))
            elif k == "RETURN":
                v = None
                if instr.value is not None:
                    v = self.eval(frame, instr.value, instr.loc)
                frame.ret_parts.append((frame.guard, v))
                frame.guard = FALSE
            elif k == "CALL":
                self._exec_call(frame, instr)
            else:
                raise SymexError(instr.loc, f"unknown instruction {k}")
            pc += 1
        return self._merge_ret(fn, frame)

    def _merge_ret(self, fn, frame: _Frame):
        if fn.ret_ty is None or fn.ret_ty.kind == "void":
            return None
        parts = [(g, v) for g, v in frame.ret_parts if v is not None]
        if not parts:
            return self.fresh_nondet(f"{fn.display_name}::$undef_return", frame.guard)
        out = parts[-1][1]
        for g, v in reversed(parts[:-1]):
            out = mk_ite(g, v, out)
        return self.f(out)

    def _merge_states(self, frame: _Frame, incoming: list, loc: SourceLoc) -> None:
        states = [(frame.guard, frame.env, frame.objbind)] + incoming
        live = [(g, env, ob) for g, env, ob in states if not (isinstance(g, Const) and not g.value)]
        if not live:
            frame.guard = FALSE
            if incoming:
                _, frame.env, frame.objbind = incoming[-1]
            return
        if len(live) == 1:
            frame.guard, frame.env, frame.objbind = live[0]
            return
        guard = live[0][0]
        for g, _, _ in live[1:]:
            guard = mk_or(guard, g)
        merged_env: dict[str, Expr | None] = {}
        all_vars: list[str] = []
        for _, env, _ in live:
            for v in env:
                if v not in all_vars:
                    all_vars.append(v)
        for var in all_vars:
            vals = [env.get(var) for _, env, _ in live]
            first = vals[0]
            if all(v == first for v in vals[1:]):
                merged_env[var] = first
                continue
            exprs = []
            for (g, env, _), v in zip(live, vals):
                if v is None:
                    v = self.fresh_nondet(f"{var}$uninit", g, _first_ty(vals))
                exprs.append((g, v))
            out = exprs[-1][1]
            for g, v in reversed(exprs[:-1]):
                out = mk_ite(g, v, out)
            ty = out.ty if hasattr(out, "ty") else "int"
            merged_env[var] = self.equate(TRUE, var, self.f(out), ty, loc)
        merged_ob: dict[str, int] = {}
        for _, _, ob in live:
            for k, v in ob.items():
                if k in merged_ob and merged_ob[k] != v:
                    raise SymexError(loc, f"conflicting object bindings for '{k}'")
                merged_ob[k] = v
        frame.guard = self.f(guard)
        frame.env = merged_env
        frame.objbind = merged_ob

    # -- instruction helpers -----------------------------------------------------------

    def _exec_decl(self, frame: _Frame, instr) -> None:
        if not instr.is_object:
            frame.env[instr.var] = None
            return
        ty = instr.var_ty
        short = instr.display or instr.var.rsplit("::", 1)[-1]
        if ty.kind == "class":
            size = max(self.om.layouts[ty.name].size, 1)
            obj = self.new_object("slots", short, ty.name, size, heap=False)
        elif ty.kind == "array":
            obj = self.new_object("array", short, None, ty.length, heap=False)
        else:
            obj = self.new_object("slots", short, None, 1, heap=False)
        frame.objbind[instr.var] = obj.oid

    def _exec_call(self, frame: _Frame, instr) -> None:
        callee = instr.callee
        loc = instr.loc
        g = frame.guard
        if isinstance(callee, CalleeNondet):
            v = self.fresh_nondet(_lhs_base(instr.lhs) or "nondet", g)
            self.store(frame, instr.lhs, v, loc, known_sym=v)
            return
        if isinstance(callee, CalleeAlloc):
            self.dyn_count += 1
            cls = callee.type_name if callee.type_name in self.om.layouts else None
            obj = self.new_object("slots", f"dyn${self.dyn_count}", cls, callee.size, heap=True)
            obj.valid = g if not isinstance(g, Const) else TRUE
            self.store(frame, instr.lhs, Const(encode_ptr(obj.oid, 0), "ptr"), loc)
            return
        args = [self.eval(frame, a, loc) for a in instr.args]
        if isinstance(callee, CalleeDealloc):
            self._exec_dealloc(frame, callee, args[0], loc)
            return
        if isinstance(callee, CalleeDirect):
            ret = self.exec_function(callee.name, args, g)
            if instr.lhs is not None:
                self.store(frame, instr.lhs, ret if ret is not None else Const(0), loc)
            return
        assert isinstance(callee, CalleeVirtual)
        self._exec_virtual(frame, instr, callee, args, loc)

    def _exec_dealloc(self, frame: _Frame, callee: CalleeDealloc, p: Expr, loc: SourceLoc) -> None:
        cands, invalid_g = self.resolve_ptr(p)
        ok_whole: Expr = FALSE
        mismatch_claim: Expr = FALSE
        any_mismatch_candidate = False
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            ok = mk_and(obj.valid, TRUE if obj.heap else FALSE)
            ok_whole = mk_or(ok_whole, mk_and(g_i, ok))
            if callee.static_cls and not callee.dtor_virtual and obj.cls is not None:
                any_mismatch_candidate = True
                mismatch_claim = mk_or(mismatch_claim, mk_and(g_i, Const(int(obj.cls == callee.static_cls), "bool")))
        if self.cfg.memory:
            self.sys.properties.append(
                Property(self.pguard(frame), self.f(ok_whole), "deallocation", "invalid delete", loc, self.fn_display)
            )
            if any_mismatch_candidate:
                self.sys.properties.append(
                    Property(
                        self.pguard(frame),
                        self.f(mk_or(mismatch_claim, mk_not(ok_whole))),
                        "deallocation",
                        "delete of object with non-virtual destructor and mismatched dynamic type",
                        loc,
                        self.fn_display,
                    )
                )
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            kill = mk_and(frame.guard, mk_and(g_i, mk_and(obj.valid, TRUE if obj.heap else FALSE)))
            obj.valid = self.f(mk_and(obj.valid, mk_not(kill)))

    def _exec_virtual(self, frame: _Frame, instr, callee: CalleeVirtual, args: list, loc: SourceLoc) -> None:
        recv = args[0]
        cands, invalid_g = self.resolve_ptr(recv)
        valid_claim: Expr = FALSE
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            valid_claim = mk_or(valid_claim, mk_and(g_i, obj.valid))
        if self.cfg.memory:
            self.sys.properties.append(
                Property(
                    self.pguard(frame),
                    self.f(valid_claim),
                    "pointer-validity",
                    "dereference failure: invalid pointer",
                    loc,
                    self.fn_display,
                )
            )
        view = callee.view
        voff = self.om.layouts[view].vptr_views[view]
        parts: list[tuple[Expr, Expr | None]] = []
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            if obj.kind != "slots" or obj.cls is None:
                continue
            off_f = self.f(off)
            if not isinstance(off_f, Const):
                continue
            slot = off_f.value + voff
            if not (0 <= slot < obj.size):
                continue
            tag = self.read_slot(obj, slot, "int", frame.guard)
            tag_f = self.fd(tag)
            for dyn in self.om.dispatch_candidates(self.world, view):
                match = self.fd(mk_eq_tag(tag_f, self.om.tags[dyn]))
                if isinstance(match, Const) and not match.value:
                    continue
                vt = self.om.vtables.get((view, dyn))
                if vt is None:
                    continue
                entry = vt.entries[callee.index]
                sub_guard = self.fd(mk_and(frame.guard, mk_and(g_i, match)))
                if isinstance(sub_guard, Const) and not sub_guard.value:
                    continue
                ret = self.exec_function(entry.target, args, sub_guard)
                parts.append((sub_guard, ret))
        if instr.lhs is not None:
            merged: Expr | None = None
            for g_p, r in parts:
                r = r if r is not None else Const(0)
                merged = r if merged is None else mk_ite(g_p, r, merged)
            if merged is None:
                merged = self.fresh_nondet(_lhs_base(instr.lhs) or "vcall", frame.guard)
            self.store(frame, instr.lhs, self.f(merged), loc)

    # -- pointer resolution ----------------------------------------------------------------

    def resolve_ptr(self, p: Expr, _guard: Expr = TRUE, _depth: int = 0):
        """Split a pointer expression into guarded (object, offset) candidates."""
        cands: list[tuple[Expr, int, Expr]] = []
        invalid: list[Expr] = []

        def walk(e: Expr, g: Expr, delta: Expr, depth: int) -> None:
            if depth > 64:
                invalid.append(g)
                return
            e = fold(e, self.sys.defs)
            if isinstance(e, Const):
                oid = ptr_obj(e.value)
                if oid == 0 or oid not in self.objects:
                    invalid.append(g)
                    return
                off = fold(Bin("add", Const(ptr_off(e.value)), delta)) if not _is_zero(delta) else Const(
                    ptr_off(e.value)
                )
                cands.append((g, oid, off))
                return
            if isinstance(e, PtrAdd):
                walk(e.p, g, fold(Bin("add", delta, e.delta), self.sys.defs), depth + 1)
                return
            if isinstance(e, Ite):
                walk(e.a, mk_and(g, e.c), delta, depth + 1)
                walk(e.b, mk_and(g, mk_not(e.c)), delta, depth + 1)
                return
            if isinstance(e, Sym) and e.name in self.sys.defs:
                walk(self.sys.defs[e.name], g, delta, depth + 1)
                return
            invalid.append(g)

        walk(p, _guard, Const(0), 0)
        inv = FALSE
        for g in invalid:
            inv = mk_or(inv, g)
        return cands, self.f(inv)

    # -- memory ------------------------------------------------------------------------------

    def read_slot(self, obj: SymObject, slot: int, ty: str, guard: Expr) -> Expr:
        v = obj.slots[slot]
        if v is None:
            v = self.fresh_nondet(obj.slot_names[slot], guard, ty)
            obj.slots[slot] = v
        return v

    def mem_read(self, frame: _Frame, lv: LMem, loc: SourceLoc) -> Expr:
        p = self.eval(frame, lv.ptr, loc)
        cands, invalid_g = self.resolve_ptr(p)
        idx = None
        if lv.index is not None:
            idx = self.eval(frame, lv.index, loc)
        direct = isinstance(lv.ptr, AddrVar)
        ok_whole: Expr = FALSE
        bounds_claim: Expr | None = None
        parts: list[tuple[Expr, Expr]] = []
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            off_total = fold(Bin("add", off, Const(lv.delta)), self.sys.defs) if lv.delta else off
            if idx is not None:
                off_total = fold(Bin("add", off_total, idx), self.sys.defs)
                length = obj.size if obj.kind == "array" else lv.length
                inb = mk_and(Bin("ge", idx, Const(0)), Bin("lt", idx, Const(length)))
                bounds_claim = inb if bounds_claim is None else mk_and(bounds_claim, mk_or(mk_not(g_i), inb))
            inrange = mk_and(
                Bin("ge", off_total, Const(0)), Bin("lt", off_total, Const(obj.size))
            )
            ok = mk_and(obj.valid, inrange)
            ok_whole = mk_or(ok_whole, mk_and(g_i, ok))
            if obj.kind == "array":
                parts.append((mk_and(g_i, ok), Select(obj.arr, off_total, lv.ty)))
            else:
                off_c = self.fd(off_total)
                if isinstance(off_c, Const) and 0 <= off_c.value < obj.size:
                    parts.append((mk_and(g_i, ok), self.read_slot(obj, off_c.value, lv.ty, frame.guard)))
                else:
                    # non-constant offset into a slot object: enumerate slots
                    for s_i in range(obj.size):
                        g_s = mk_and(g_i, mk_and(ok, Bin("eq", off_total, Const(s_i))))
                        g_s = self.fd(g_s)
                        if isinstance(g_s, Const) and not g_s.value:
                            continue
                        parts.append((g_s, self.read_slot(obj, s_i, lv.ty, frame.guard)))
        if self.cfg.bounds and idx is not None:
            if bounds_claim is None:
                bounds_claim = mk_and(Bin("ge", idx, Const(0)), Bin("lt", idx, Const(lv.length)))
            self.sys.properties.append(
                Property(self.pguard(frame), self.f(bounds_claim), "bounds", "array index out of bounds", loc, self.fn_display)
            )
        if self.cfg.memory and not direct and not lv.no_check:
            self.sys.properties.append(
                Property(
                    self.pguard(frame),
                    self.f(ok_whole),
                    "pointer-validity",
                    "dereference failure: invalid pointer",
                    loc,
                    self.fn_display,
                )
            )
        out: Expr = Const(0, lv.ty)
        for g_p, v in reversed(parts):
            out = mk_ite(g_p, v, out)
        return self.f(out)

    def mem_write(self, frame: _Frame, lv: LMem, value: Expr, loc: SourceLoc) -> None:
        p = self.eval(frame, lv.ptr, loc)
        cands, invalid_g = self.resolve_ptr(p)
        idx = None
        if lv.index is not None:
            idx = self.eval(frame, lv.index, loc)
        direct = isinstance(lv.ptr, AddrVar)
        ok_whole: Expr = FALSE
        bounds_claim: Expr | None = None
        for g_i, oid, off in cands:
            obj = self.objects[oid]
            off_total = fold(Bin("add", off, Const(lv.delta)), self.sys.defs) if lv.delta else off
            if idx is not None:
                off_total = fold(Bin("add", off_total, idx), self.sys.defs)
                length = obj.size if obj.kind == "array" else lv.length
                inb = mk_and(Bin("ge", idx, Const(0)), Bin("lt", idx, Const(length)))
                bounds_claim = inb if bounds_claim is None else mk_and(bounds_claim, mk_or(mk_not(g_i), inb))
            inrange = mk_and(Bin("ge", off_total, Const(0)), Bin("lt", off_total, Const(obj.size)))
            ok = mk_and(obj.valid, inrange)
            ok_whole = mk_or(ok_whole, mk_and(g_i, ok))
            wg = self.fd(mk_and(frame.guard, mk_and(g_i, ok)))
            if isinstance(wg, Const) and not wg.value:
                continue
            if obj.kind == "array":
                obj.writes += 1
                new_arr = mk_ite(wg, Store(obj.arr, off_total, _to_int_cell(value)), obj.arr)
                sym = self.equate(TRUE, obj.name, self.f(new_arr), "arr", loc)
                obj.arr = sym
            else:
                off_c = self.fd(off_total)
                if isinstance(off_c, Const):
                    if 0 <= off_c.value < obj.size:
                        self._write_slot(obj, off_c.value, value, wg, lv.ty, loc)
                else:
                    for s_i in range(obj.size):
                        g_s = self.fd(mk_and(wg, Bin("eq", off_total, Const(s_i))))
                        if isinstance(g_s, Const) and not g_s.value:
                            continue
                        self._write_slot(obj, s_i, value, g_s, lv.ty, loc)
        if self.cfg.bounds and idx is not None:
            if bounds_claim is None:
                bounds_claim = mk_and(Bin("ge", idx, Const(0)), Bin("lt", idx, Const(lv.length)))
            self.sys.properties.append(
                Property(self.pguard(frame), self.f(bounds_claim), "bounds", "array index out of bounds", loc, self.fn_display)
            )
        if self.cfg.memory and not direct and not lv.no_check:
            self.sys.properties.append(
                Property(
                    self.pguard(frame),
                    self.f(ok_whole),
                    "pointer-validity",
                    "dereference failure: invalid pointer",
                    loc,
                    self.fn_display,
                )
            )

    def _write_slot(self, obj: SymObject, slot: int, value: Expr, wg: Expr, ty: str, loc: SourceLoc) -> None:
        old = obj.slots[slot]
        if isinstance(wg, Const) and wg.value:
            merged = value
        else:
            if old is None:
                old = self.fresh_nondet(obj.slot_names[slot], TRUE, ty)
            merged = mk_ite(wg, value, old)
        sym = self.equate(TRUE, obj.slot_names[slot], self.f(merged), ty, loc)
        obj.slots[slot] = sym

    # -- expression evaluation ---------------------------------------------------------------

    def eval(self, frame: _Frame, e: Expr, loc: SourceLoc) -> Expr:
        g = frame.guard
        if isinstance(e, Const):
            return e
        if isinstance(e, Sym):
            if e.name in frame.env:
                v = frame.env[e.name]
                if v is None:
                    v = self.fresh_nondet(e.name, g, e.ty)
                    frame.env[e.name] = v
                return v
            v = self.fresh_nondet(e.name, g, e.ty)
            frame.env[e.name] = v
            return v
        if isinstance(e, AddrVar):
            oid = frame.objbind.get(e.var)
            if oid is None:
                oid = self.globals.get(e.var)
            if oid is None:
                raise SymexError(loc, f"no object bound to '{e.var}'")
            return Const(encode_ptr(oid, 0), "ptr")
        if isinstance(e, Read):
            return self.mem_read(frame, e.lv, loc)
        if isinstance(e, Un):
            a = self.eval(frame, e.a, loc)
            if self.cfg.overflow and e.op == "neg":
                self.sys.properties.append(
                    Property(self.pguard(frame), self.f(NoOverflow("neg", a)), "overflow", "arithmetic overflow on neg", loc, self.fn_display)
                )
            return self.f(Un(e.op, a))
        if isinstance(e, Bin):
            a = self.eval(frame, e.a, loc)
            b = self.eval(frame, e.b, loc)
            if self.cfg.overflow and e.op in ("add", "sub", "mul"):
                self.sys.properties.append(
                    Property(
                        self.pguard(frame),
                        self.f(NoOverflow(e.op, a, b)),
                        "overflow",
                        f"arithmetic overflow on {e.op}",
                        loc,
                        self.fn_display,
                    )
                )
            if self.cfg.overflow and e.op in ("div", "rem"):
                self.sys.properties.append(
                    Property(self.pguard(frame), self.f(Bin("ne", b, Const(0))), "overflow", "division by zero", loc, self.fn_display)
                )
                self.sys.properties.append(
                    Property(
                        self.pguard(frame),
                        self.f(NoOverflow("div", a, b)),
                        "overflow",
                        "arithmetic overflow on div",
                        loc,
                        self.fn_display,
                    )
                )
            return self.f(Bin(e.op, a, b))
        if isinstance(e, Ite):
            c = self.eval(frame, e.c, loc)
            a = self.eval(frame, e.a, loc)
            b = self.eval(frame, e.b, loc)
            return self.f(mk_ite(c, a, b))
        if isinstance(e, PtrAdd):
            p = self.eval(frame, e.p, loc)
            d = self.eval(frame, e.delta, loc)
            return self.f(PtrAdd(p, d))
        raise SymexError(loc, f"cannot evaluate {type(e).__name__} symbolically")

    def store(self, frame: _Frame, target, value: Expr, loc: SourceLoc, known_sym: Sym | None = None) -> None:
        if target is None:
            return
        if isinstance(target, LVar):
            if known_sym is not None:
                frame.env[target.var] = known_sym
                return
            frame.env[target.var] = self.equate(frame.guard, target.var, value, target.ty, loc)
            return
        self.mem_write(frame, target, value, loc)


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def _lhs_base(lhs) -> str:
    if isinstance(lhs, LVar):
        return lhs.var
    return ""


def _first_ty(vals):
    for v in vals:
        if v is not None and hasattr(v, "ty"):
            return v.ty
    return "int"


def _to_int_cell(v: Expr) -> Expr:
    return v


def mk_eq_tag(tag: Expr, value: int) -> Expr:
    return Bin("eq", tag, Const(value))


def symex(model: GotoModel, cfg: UnwindConfig | None = None) -> SsaSystem:
    """Bounded symbolic execution of the GOTO model."""
    return Symex(model, cfg or UnwindConfig()).run()
