"""Concrete GOTO interpreter: differential oracle and counterexample replay.

Executes the same GOTO model the symbolic engine consumes, with identical
operator semantics (32-bit wrap, SMT-LIB division) and identical safety
check synthesis, so per-property verdicts are directly comparable.
Uninitialized scalar reads draw from the supplied nondet sequence, exactly
like symbolic execution introduces fresh nondet symbols.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import OracleError, SourceLoc
from .exprs import (
    AddrVar,
    Bin,
    Const,
    Expr,
    Ite,
    PtrAdd,
    Sym,
    Un,
    eval_binop,
    eval_no_overflow,
    eval_unop,
    encode_ptr,
    ptr_obj,
    ptr_off,
    wrap,
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

MAX_STEPS_DEFAULT = 2_000_000
MAX_CALL_DEPTH = 400


@dataclass
class CheckRecord:
    kind: str
    loc: SourceLoc
    function: str
    desc: str
    ok: bool
    index: int  # global check ordinal

    @property
    def key(self):
        return (self.kind, self.loc.file, self.loc.line, self.loc.column, self.desc)


@dataclass
class ConcreteObject:
    oid: int
    kind: str  # 'slots' | 'array'
    site: str
    cls: str | None
    size: int
    heap: bool
    slots: list = field(default_factory=list)  # None = indeterminate
    valid: bool = True


@dataclass
class InterpResult:
    verdict: str  # SUCCESSFUL | FAILED
    violated: CheckRecord | None
    checks: list
    ret: int | None
    nondet_consumed: list
    halted: str = ""


class ChecksConfig:
    def __init__(self, overflow=False, bounds=False, memory=False):
        self.overflow = overflow
        self.bounds = bounds
        self.memory = memory


class _Violation(Exception):
    pass


class _AssumeFailed(Exception):
    pass


class Interp:
    def __init__(
        self,
        model: GotoModel,
        nondet_values,
        checks: ChecksConfig | None = None,
        stop_at_first: bool = True,
        max_steps: int = MAX_STEPS_DEFAULT,
    ):
        self.model = model
        self.world = model.world
        self.om = model.om
        self.checks_cfg = checks or ChecksConfig()
        self.stop_at_first = stop_at_first
        self.max_steps = max_steps
        self.nondet_values = list(nondet_values)
        self.nondet_pos = 0
        self.nondet_consumed: list[int] = []
        self.objects: dict[int, ConcreteObject] = {}
        self.next_oid = 1
        self.globals: dict[str, int] = {}
        self.checks: list[CheckRecord] = []
        self.violated: CheckRecord | None = None
        self.steps = 0
        self.tag_to_class = {tag: cls for cls, tag in self.om.tags.items()}
        self.current_fn_display = ""

    # -- plumbing -----------------------------------------------------------

    def draw_nondet(self) -> int:
        if self.nondet_pos >= len(self.nondet_values):
            raise OracleError("nondet_values exhausted")
        v = self.nondet_values[self.nondet_pos]
        self.nondet_pos += 1
        self.nondet_consumed.append(v)
        return wrap(v)

    def new_object(self, kind: str, site: str, cls: str | None, size: int, heap: bool) -> ConcreteObject:
        oid = self.next_oid
        self.next_oid += 1
        if kind == "array":
            slots = [0] * size
        else:
            slots = [None] * size
        obj = ConcreteObject(oid=oid, kind=kind, site=site, cls=cls, size=size, heap=heap, slots=slots)
        self.objects[oid] = obj
        return obj

    def record_check(self, kind: str, loc: SourceLoc, desc: str, ok: bool) -> None:
        rec = CheckRecord(kind, loc, self.current_fn_display, desc, ok, len(self.checks))
        self.checks.append(rec)
        if not ok and self.violated is None:
            self.violated = rec
            if self.stop_at_first:
                raise _Violation()

    # -- entry --------------------------------------------------------------

    def run(self) -> InterpResult:
        self.setup_globals()
        halted = ""
        ret = None
        try:
            self.call_function(self.model.init_fn, [], SourceLoc("<entry>", 1, 1))
            ret = self.call_function(self.model.entry, [], SourceLoc("<entry>", 1, 1))
        except _Violation:
            pass
        except _AssumeFailed:
            halted = "assume"
        verdict = "FAILED" if self.violated is not None else "SUCCESSFUL"
        return InterpResult(
            verdict=verdict,
            violated=self.violated,
            checks=self.checks,
            ret=ret,
            nondet_consumed=self.nondet_consumed,
            halted=halted,
        )

    def setup_globals(self) -> None:
        for name, ty in self.model.globals:
            if ty.kind == "class":
                size = self.om.layouts[ty.name].size
                obj = self.new_object("slots", name, ty.name, max(size, 1), heap=False)
                obj.slots = [0] * obj.size  # globals are zero-initialized
            elif ty.kind == "array":
                obj = self.new_object("array", name, None, ty.length, heap=False)
            else:
                obj = self.new_object("slots", name, None, 1, heap=False)
                obj.slots = [0]
            self.globals[name] = obj.oid

    # -- function execution ---------------------------------------------------

    def call_function(self, name: str, args: list[int], call_loc: SourceLoc, depth: int = 0):
        if depth > MAX_CALL_DEPTH:
            raise OracleError(f"call depth limit exceeded at '{name}'")
        fn = self.model.functions.get(name)
        if fn is None:
            raise OracleError(f"undefined function '{name}'")
        prev_display = self.current_fn_display
        self.current_fn_display = fn.display_name
        env: dict[str, int | None] = {}
        objbind: dict[str, int] = {}
        for (pname, _pty, _tref), v in zip(fn.params, args):
            env[pname] = v
        pc = 0
        retval = None
        instrs = fn.instrs
        try:
            while True:
                self.steps += 1
                if self.steps > self.max_steps:
                    raise OracleError(f"step limit exceeded in '{name}'")
                instr = instrs[pc]
                k = instr.kind
                if k == "END_FUNCTION":
                    break
                if k == "DECL":
                    if instr.is_object:
                        ty = instr.var_ty
                        if ty.kind == "class":
                            size = self.om.layouts[ty.name].size
                            obj = self.new_object("slots", instr.var, ty.name, max(size, 1), heap=False)
                        elif ty.kind == "array":
                            obj = self.new_object("array", instr.var, None, ty.length, heap=False)
                        else:
                            obj = self.new_object("slots", instr.var, None, 1, heap=False)
                        objbind[instr.var] = obj.oid
                    else:
                        env[instr.var] = None
                elif k == "DEAD":
                    oid = objbind.get(instr.var)
                    if oid is not None:
                        self.objects[oid].valid = False
                elif k == "ASSIGN":
                    v = self.eval(instr.rhs, env, objbind, instr.loc)
                    self.store(instr.target, v, env, objbind, instr.loc)
                elif k == "ASSERT":
                    v = self.eval(instr.expr, env, objbind, instr.loc)
                    self.record_check("assertion", instr.loc, instr.desc, bool(v))
                elif k == "ASSUME":
                    v = self.eval(instr.expr, env, objbind, instr.loc)
                    if not v:
                        raise _AssumeFailed()
                elif k == "GOTO":
                    take = True
                    if instr.expr is not None:
                        take = bool(self.eval(instr.expr, env, objbind, instr.loc))
                    if take:
                        pc = instr.goto_target
                        continue
                elif k == "RETURN":
                    if instr.value is not None:
                        retval = self.eval(instr.value, env, objbind, instr.loc)
                    pc = len(instrs) - 1
                    continue
                elif k == "CALL":
                    self.exec_call(instr, env, objbind, depth)
                else:
                    raise OracleError(f"unknown instruction {k}")
                pc += 1
        finally:
            self.current_fn_display = prev_display
        return retval

    def exec_call(self, instr, env, objbind, depth) -> None:
        callee = instr.callee
        loc = instr.loc
        if isinstance(callee, CalleeNondet):
            v = self.draw_nondet()
            self.store(instr.lhs, v, env, objbind, loc)
            return
        if isinstance(callee, CalleeAlloc):
            cls = callee.type_name if callee.type_name in self.om.layouts else None
            kind = "slots"
            obj = self.new_object(kind, f"dyn@{loc.line}", cls, callee.size, heap=True)
            self.store(instr.lhs, encode_ptr(obj.oid, 0), env, objbind, loc)
            return
        args = [self.eval(a, env, objbind, loc) for a in instr.args]
        if isinstance(callee, CalleeDealloc):
            p = args[0]
            obj = self.objects.get(ptr_obj(p))
            ok = obj is not None and obj.valid and obj.heap and p != 0
            if self.checks_cfg.memory:
                self.record_check("deallocation", loc, "invalid delete", ok)
                if callee.static_cls and not callee.dtor_virtual and obj is not None and obj.cls is not None:
                    self.record_check(
                        "deallocation",
                        loc,
                        "delete of object with non-virtual destructor and mismatched dynamic type",
                        obj.cls == callee.static_cls,
                    )
            if obj is not None and ok:
                obj.valid = False
            return
        if isinstance(callee, CalleeDirect):
            ret = self.call_function(callee.name, args, loc, depth + 1)
            if instr.lhs is not None:
                self.store(instr.lhs, ret if ret is not None else 0, env, objbind, loc)
            return
        assert isinstance(callee, CalleeVirtual)
        p = args[0]
        obj = self.objects.get(ptr_obj(p))
        valid = obj is not None and obj.valid and p != 0
        if self.checks_cfg.memory:
            self.record_check("pointer-validity", loc, "dereference failure: invalid pointer", valid)
        if not valid:
            raise OracleError(f"virtual dispatch through invalid pointer at {loc}")
        view = callee.view
        voff = self.om.layouts[view].vptr_views[view]
        base = ptr_off(p)
        tag = obj.slots[base + voff]
        dyn_cls = self.tag_to_class.get(tag)
        if dyn_cls is None:
            raise OracleError(f"virtual dispatch through uninitialized vptr at {loc}")
        vt = self.om.vtables[(view, dyn_cls)]
        entry = vt.entries[callee.index]
        ret = self.call_function(entry.target, args, loc, depth + 1)
        if instr.lhs is not None:
            self.store(instr.lhs, ret if ret is not None else 0, env, objbind, loc)

    # -- memory ------------------------------------------------------------------

    def locate(self, lv: LMem, env, objbind, loc) -> tuple[ConcreteObject | None, int, bool]:
        p = self.eval(lv.ptr, env, objbind, loc)
        oid = ptr_obj(p)
        obj = self.objects.get(oid)
        off = ptr_off(p) + lv.delta
        if lv.index is not None:
            idx = self.eval(lv.index, env, objbind, loc)
            length = obj.size if (obj is not None and obj.kind == "array") else lv.length
            if self.checks_cfg.bounds:
                self.record_check("bounds", loc, "array index out of bounds", 0 <= idx < max(length, 0))
            off += idx
        direct = isinstance(lv.ptr, AddrVar)
        ok = obj is not None and obj.valid and p != 0 and 0 <= off < obj.size
        if self.checks_cfg.memory and not direct and not lv.no_check:
            self.record_check("pointer-validity", loc, "dereference failure: invalid pointer", ok)
        return obj, off, ok

    def load(self, lv: LMem, env, objbind, loc) -> int:
        obj, off, ok = self.locate(lv, env, objbind, loc)
        if not ok:
            return 0
        v = obj.slots[off]
        if v is None:
            v = self.draw_nondet()
            obj.slots[off] = v
        return v

    def store(self, target, v: int, env, objbind, loc) -> None:
        if target is None:
            return
        if isinstance(target, LVar):
            env[target.var] = v
            return
        obj, off, ok = self.locate(target, env, objbind, loc)
        if ok:
            obj.slots[off] = v

    # -- expressions ----------------------------------------------------------------

    def eval(self, e: Expr, env, objbind, loc) -> int:
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Sym):
            if e.name in env:
                v = env[e.name]
                if v is None:
                    v = self.draw_nondet()
                    env[e.name] = v
                return v
            # reading a never-declared symbol (e.g. undefined return slot)
            v = self.draw_nondet()
            env[e.name] = v
            return v
        if isinstance(e, AddrVar):
            oid = objbind.get(e.var)
            if oid is None:
                oid = self.globals.get(e.var)
            if oid is None:
                raise OracleError(f"no object bound to '{e.var}'")
            return encode_ptr(oid, 0)
        if isinstance(e, Read):
            return self.load(e.lv, env, objbind, loc)
        if isinstance(e, Un):
            a = self.eval(e.a, env, objbind, loc)
            if self.checks_cfg.overflow and e.op == "neg":
                self.record_check("overflow", loc, "arithmetic overflow on neg", bool(eval_no_overflow("neg", a, None)))
            return eval_unop(e.op, a)
        if isinstance(e, Bin):
            if e.op == "and":
                a = self.eval(e.a, env, objbind, loc)
                b = self.eval(e.b, env, objbind, loc)
                return int(bool(a) and bool(b))
            if e.op == "or":
                a = self.eval(e.a, env, objbind, loc)
                b = self.eval(e.b, env, objbind, loc)
                return int(bool(a) or bool(b))
            a = self.eval(e.a, env, objbind, loc)
            b = self.eval(e.b, env, objbind, loc)
            if self.checks_cfg.overflow and e.op in ("add", "sub", "mul"):
                self.record_check(
                    "overflow", loc, f"arithmetic overflow on {e.op}", bool(eval_no_overflow(e.op, a, b))
                )
            if self.checks_cfg.overflow and e.op in ("div", "rem"):
                self.record_check("overflow", loc, "division by zero", b != 0)
                self.record_check(
                    "overflow", loc, "arithmetic overflow on div", not (a == -(2**31) and b == -1)
                )
            return eval_binop(e.op, a, b)
        if isinstance(e, Ite):
            c = self.eval(e.c, env, objbind, loc)
            return self.eval(e.a if c else e.b, env, objbind, loc)
        if isinstance(e, PtrAdd):
            p = self.eval(e.p, env, objbind, loc)
            d = self.eval(e.delta, env, objbind, loc)
            return wrap(p + d)
        raise OracleError(f"cannot evaluate {type(e).__name__} concretely")


def interpret_concrete(
    model: GotoModel,
    nondet_values=(),
    checks: ChecksConfig | None = None,
    stop_at_first: bool = True,
    max_steps: int = MAX_STEPS_DEFAULT,
) -> InterpResult:
    """Execute the GOTO model concretely; the differential/replay oracle."""
    return Interp(model, nondet_values, checks, stop_at_first, max_steps).run()
