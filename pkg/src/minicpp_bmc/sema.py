"""Name resolution, type checking, and default-member synthesis.

The checker instantiates templates on demand through a pluggable engine
(see templates.py); for template-free programs it is a plain one-pass
checker.  All annotations happen in place: expression nodes get `.ty`,
calls get `.dispatch`, classes are registered as ClassInfo records in a
World attached to the returned program.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast_nodes import (
    AssertStmt,
    AssignExpr,
    Binary,
    Block,
    BoolLit,
    Call,
    CastExpr,
    ClassDecl,
    DeleteExpr,
    Expr,
    ExprStmt,
    ForStmt,
    FunctionDecl,
    Ident,
    IfStmt,
    ImplicitCast,
    IndexExpr,
    IntLit,
    Member,
    NewExpr,
    NullLit,
    Param,
    Program,
    ReturnStmt,
    Stmt,
    TemplateDecl,
    TemplateId,
    ThisExpr,
    TypedefDecl,
    TypeRef,
    Unary,
    VarDecl,
    WhileStmt,
    BOOL,
    INT,
    VOID,
    class_type,
    ptr_to,
    same_type,
    type_text,
)
from .diagnostics import SourceLoc, TypeCheckError

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1

NONDET_INT = "nondet_int"


def mangle_type(t: TypeRef) -> str:
    if t.kind in ("int", "bool", "void"):
        return t.kind
    if t.kind == "class":
        return t.name
    if t.kind == "ptr":
        return mangle_type(t.inner) + "*"
    if t.kind == "ref":
        return mangle_type(t.inner) + "&"
    if t.kind == "array":
        return f"{mangle_type(t.inner)}[{t.length}]"
    raise AssertionError(t.kind)


def mangle_function(owner: str | None, name: str, param_tys: list[TypeRef]) -> str:
    args = ",".join(mangle_type(t) for t in param_tys)
    if owner:
        return f"{owner}::{name}({args})"
    return f"{name}({args})"


@dataclass
class MethodInfo:
    decl: FunctionDecl
    cls: str  # defining class
    name: str
    param_tys: list  # declared parameter types (receiver excluded)
    ret: TypeRef
    is_virtual: bool = False  # declared or inherited virtual
    overrides: list = field(default_factory=list)  # mangled names of overridden base methods

    @property
    def sig_key(self):
        return (self.name, tuple(mangle_type(t) for t in self.param_tys))

    @property
    def mangled(self) -> str:
        return self.decl.mangled


@dataclass
class ClassInfo:
    name: str
    decl: ClassDecl
    bases: list = field(default_factory=list)  # (base class name, virtual flag)
    fields: list = field(default_factory=list)  # (name, TypeRef)
    methods: list = field(default_factory=list)  # MethodInfo, declaration order
    ctors: list = field(default_factory=list)  # FunctionDecl
    dtor: FunctionDecl | None = None
    template_origin: tuple | None = None  # (template name, args) for instantiations
    complete: bool = False  # bases and fields resolved

    def find_field(self, name: str):
        for fname, fty in self.fields:
            if fname == name:
                return fty
        return None

    def own_method(self, sig_key):
        for m in self.methods:
            if m.sig_key == sig_key:
                return m
        return None


@dataclass
class SymbolEntry:
    kind: str  # 'class' | 'function' | 'global' | 'typedef'
    name: str  # mangled
    ty: TypeRef | None
    loc: SourceLoc
    node: object


class SymbolTable:
    def __init__(self) -> None:
        self.entries: dict[str, SymbolEntry] = {}

    def add(self, entry: SymbolEntry) -> None:
        if entry.name in self.entries:
            prior = self.entries[entry.name]
            if prior.node is entry.node:
                return
            raise TypeCheckError(entry.loc, f"duplicate symbol '{entry.name}' (first at {prior.loc})")
        self.entries[entry.name] = entry

    def lookup(self, name: str) -> SymbolEntry | None:
        return self.entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)


class World:
    """All semantic knowledge about one translation unit."""

    def __init__(self) -> None:
        self.classes: dict[str, ClassInfo] = {}
        self.functions: dict[str, FunctionDecl] = {}  # mangled -> decl
        self.free_overloads: dict[str, list[str]] = {}  # source name -> mangled names
        self.globals: dict[str, VarDecl] = {}
        self.global_order: list[str] = []
        self.typedefs: dict[str, TypeRef] = {}
        self.symtab = SymbolTable()
        self.templates = None  # TemplateWorld, attached by templates.py

    # hierarchy helpers -----------------------------------------------------

    def cls(self, name: str) -> ClassInfo:
        return self.classes[name]

    def all_bases(self, name: str) -> list[str]:
        """Transitive base class names, depth-first, no duplicates."""
        seen: list[str] = []

        def walk(c: str) -> None:
            for b, _v in self.classes[c].bases:
                if b not in seen:
                    seen.append(b)
                    walk(b)

        walk(name)
        return seen

    def derives_from(self, derived: str, base: str) -> bool:
        return derived == base or base in self.all_bases(derived)

    def derived_closure(self, base: str) -> list[str]:
        """base itself plus every class deriving from it, registration order."""
        return [c for c in self.classes if self.derives_from(c, base)]

    def find_method(self, cls_name: str, name: str, nargs: int) -> list[MethodInfo]:
        """Candidate methods visible on cls_name (own first, then bases)."""
        out: list[MethodInfo] = []
        seen_keys = set()
        for c in [cls_name] + self.all_bases(cls_name):
            for m in self.classes[c].methods:
                if m.name == name and len(m.param_tys) == nargs and m.sig_key not in seen_keys:
                    out.append(m)
                    seen_keys.add(m.sig_key)
        return out

    def final_overrider(self, dyn_cls: str, sig_key) -> MethodInfo:
        """Most-derived implementation of a virtual method for dynamic type dyn_cls."""
        best: MethodInfo | None = None
        # walk from dyn_cls down the base DAG; nearest definition wins
        order = [dyn_cls] + self.all_bases(dyn_cls)
        for c in order:
            m = self.classes[c].own_method(sig_key)
            if m is not None:
                if best is None:
                    best = m
                elif best.cls != m.cls and self.derives_from(best.cls, m.cls):
                    pass  # best is more derived already
                elif best.cls != m.cls and self.derives_from(m.cls, best.cls):
                    best = m
                elif best.cls != m.cls:
                    raise TypeCheckError(
                        self.classes[dyn_cls].decl.loc,
                        f"ambiguous final overrider for {sig_key[0]} in {dyn_cls}: "
                        f"{best.cls} vs {m.cls}",
                    )
        assert best is not None, (dyn_cls, sig_key)
        return best


# ---------------------------------------------------------------------------
# Scope for locals
# ---------------------------------------------------------------------------


class _Scope:
    def __init__(self, parent=None):
        self.parent = parent
        self.vars: dict[str, TypeRef] = {}

    def declare(self, name: str, ty: TypeRef, loc: SourceLoc) -> None:
        if name in self.vars:
            raise TypeCheckError(loc, f"redeclaration of '{name}'")
        self.vars[name] = ty

    def lookup(self, name: str) -> TypeRef | None:
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        return None


# ---------------------------------------------------------------------------
# The checker
# ---------------------------------------------------------------------------


class Sema:
    def __init__(self, world: World | None = None):
        self.world = world or World()
        self.current_fn: FunctionDecl | None = None
        self.current_class: str | None = None

    # -- type resolution -----------------------------------------------------

    def resolve_type(self, t: TypeRef, loc: SourceLoc, _depth: int = 0) -> TypeRef:
        if _depth > 64:
            raise TypeCheckError(loc, "circular typedef chain")
        w = self.world
        if t.kind in ("int", "bool", "void", "class"):
            return t
        if t.kind == "ptr":
            return TypeRef("ptr", inner=self.resolve_type(t.inner, loc, _depth))
        if t.kind == "ref":
            return TypeRef("ref", inner=self.resolve_type(t.inner, loc, _depth))
        if t.kind == "array":
            inner = self.resolve_type(t.inner, loc, _depth)
            length = t.length
            if length is None:
                length = const_eval_int(t.length_expr, {}, loc)
            if length < 1:
                raise TypeCheckError(loc, f"array length must be >= 1, got {length}")
            if inner.kind not in ("int", "bool", "ptr"):
                raise TypeCheckError(loc, f"array elements must be scalar, got {type_text(inner)}")
            return TypeRef("array", inner=inner, length=length)
        assert t.kind == "named", t.kind
        if t.targs:
            if w.templates is None:
                raise TypeCheckError(loc, f"template '{t.name}' used but no template engine active")
            inst = w.templates.instantiate_class(t.name, t.targs, loc)
            return class_type(inst)
        if t.name in w.typedefs:
            return self.resolve_type(w.typedefs[t.name], loc, _depth + 1)
        if t.name in w.classes:
            return class_type(t.name)
        if w.templates is not None and w.templates.is_class_template(t.name):
            # class template used without arguments: defaults may complete it
            inst = w.templates.instantiate_class(t.name, [], loc)
            return class_type(inst)
        raise TypeCheckError(loc, f"unknown type '{t.name}'")

    # -- program -------------------------------------------------------------

    def check_program(self, program: Program) -> SymbolTable:
        w = self.world
        program.world = w
        # phase A: register declarations
        for d in program.decls:
            if isinstance(d, ClassDecl):
                self.register_class(d)
            elif isinstance(d, TemplateDecl):
                if w.templates is None:
                    raise TypeCheckError(d.loc, "templates present but no template engine active")
                w.templates.register(d)
            elif isinstance(d, TypedefDecl):
                if d.name in w.typedefs:
                    raise TypeCheckError(d.loc, f"duplicate typedef '{d.name}'")
                w.typedefs[d.name] = d.ty
                w.symtab.add(SymbolEntry("typedef", d.name, None, d.loc, d))
            elif isinstance(d, FunctionDecl):
                pass  # registered below once the type environment is complete
            elif isinstance(d, VarDecl):
                pass
            else:
                raise TypeCheckError(d.loc, f"unsupported declaration {type(d).__name__}")
        # typedef cycle detection up front
        for name, ty in w.typedefs.items():
            self.resolve_typedef_probe(name)
        # resolve class hierarchies and members
        for d in program.decls:
            if isinstance(d, ClassDecl):
                self.resolve_class(d)
        for d in program.decls:
            if isinstance(d, ClassDecl):
                self.link_methods(d)
                synthesize_class_defaults(self.world, d)
        # free functions
        for d in program.decls:
            if isinstance(d, FunctionDecl):
                self.register_free_function(d)
        # globals
        for d in program.decls:
            if isinstance(d, VarDecl):
                self.register_global(d)
        # phase B: bodies
        for d in program.decls:
            if isinstance(d, ClassDecl):
                self.check_class_bodies(d)
        for d in program.decls:
            if isinstance(d, VarDecl):
                self.check_global_init(d)
        for d in program.decls:
            if isinstance(d, FunctionDecl):
                self.check_function(d)
        return w.symtab

    # -- class registration ----------------------------------------------------

    def register_class(self, d: ClassDecl) -> None:
        w = self.world
        if d.name in w.classes:
            raise TypeCheckError(d.loc, f"duplicate class '{d.name}'")
        info = ClassInfo(name=d.name, decl=d)
        w.classes[d.name] = info
        w.symtab.add(SymbolEntry("class", d.name, class_type(d.name), d.loc, d))

    def resolve_class(self, d: ClassDecl) -> None:
        w = self.world
        info = w.classes[d.name]
        if info.complete:
            return
        for b in d.bases:
            bt = self.resolve_type(b.ty, b.loc)
            if bt.kind != "class":
                raise TypeCheckError(b.loc, f"base '{type_text(b.ty)}' is not a class")
            if any(bn == bt.name for bn, _ in info.bases):
                raise TypeCheckError(b.loc, f"duplicate direct base '{bt.name}'")
            self._require_complete(bt.name, b.loc, f"base of '{d.name}'")
            info.bases.append((bt.name, b.virtual))
        for m in d.members:
            if isinstance(m, VarDecl):
                ty = self.resolve_type(m.ty, m.loc)
                if ty.kind == "array":
                    raise TypeCheckError(m.loc, "array-typed members are unsupported; use a separate array object")
                if ty.kind == "void" or ty.kind == "ref":
                    raise TypeCheckError(m.loc, f"field '{m.name}' has invalid type {type_text(ty)}")
                if ty.kind == "class":
                    self._require_complete(ty.name, m.loc, f"embedded field '{m.name}'")
                m.ty = ty
                info.fields.append((m.name, ty))
            elif isinstance(m, FunctionDecl):
                self.resolve_method(info, m)
            elif isinstance(m, TemplateDecl):
                if self.world.templates is None:
                    raise TypeCheckError(m.loc, "templates present but no template engine active")
                # member friend templates are registered when the enclosing
                # class template is instantiated; a friend template in a
                # plain class is injected immediately
                self.world.templates.register_friend(d.name, m, enclosing_bindings={})
            elif isinstance(m, TypedefDecl):
                raise TypeCheckError(m.loc, "member typedefs are unsupported")
        info.complete = True

    def _require_complete(self, cls_name: str, loc: SourceLoc, what: str) -> None:
        info = self.world.classes[cls_name]
        if not info.complete:
            from .diagnostics import TemplateError

            err = TemplateError if info.template_origin is not None else TypeCheckError
            raise err(loc, f"circular dependency: '{cls_name}' is incomplete as {what}")

    def resolve_method(self, info: ClassInfo, m: FunctionDecl) -> None:
        m.owner = info.name
        if m.body is None:
            raise TypeCheckError(m.loc, f"method '{info.name}::{m.name}' must be defined inline")
        param_tys = []
        for p in m.params:
            p.ty = self.resolve_type(p.ty, p.loc)
            self._check_param_type(p)
            param_tys.append(p.ty)
        if m.is_ctor:
            m.ret = VOID
            m.mangled = mangle_function(info.name, info.name, [ptr_to(class_type(info.name))] + param_tys)
            info.ctors.append(m)
            self.world.symtab.add(SymbolEntry("function", m.mangled, None, m.loc, m))
            self.world.functions[m.mangled] = m
            return
        if m.is_dtor:
            if m.params:
                raise TypeCheckError(m.loc, "destructor takes no parameters")
            if info.dtor is not None:
                raise TypeCheckError(m.loc, f"duplicate destructor for '{info.name}'")
            m.ret = VOID
            m.mangled = mangle_function(info.name, "~" + info.name, [ptr_to(class_type(info.name))])
            info.dtor = m
            self.world.symtab.add(SymbolEntry("function", m.mangled, None, m.loc, m))
            self.world.functions[m.mangled] = m
            return
        m.ret = self.resolve_type(m.ret, m.loc)
        if m.ret.kind in ("class", "array", "ref"):
            raise TypeCheckError(m.loc, f"return type {type_text(m.ret)} unsupported; return scalars or pointers")
        mi = MethodInfo(decl=m, cls=info.name, name=m.name, param_tys=param_tys, ret=m.ret, is_virtual=m.is_virtual)
        if info.own_method(mi.sig_key) is not None:
            raise TypeCheckError(m.loc, f"duplicate method '{info.name}::{m.name}'")
        m.mangled = mangle_function(info.name, m.name, [ptr_to(class_type(info.name))] + param_tys)
        info.methods.append(mi)
        self.world.symtab.add(SymbolEntry("function", m.mangled, None, m.loc, m))
        self.world.functions[m.mangled] = m

    def _check_param_type(self, p: Param) -> None:
        t = p.ty
        if t.kind == "void":
            raise TypeCheckError(p.loc, "parameter of type void")
        if t.kind in ("class", "array"):
            raise TypeCheckError(
                p.loc,
                f"pass {type_text(t)} parameters by reference or pointer (by-value aggregates unsupported)",
            )
        if t.kind == "ref" and t.inner.kind == "ref":
            raise TypeCheckError(p.loc, "reference to reference")

    def link_methods(self, d: ClassDecl) -> None:
        """Mark inherited virtual-ness and validate override specifiers."""
        w = self.world
        info = w.classes[d.name]
        for mi in info.methods:
            base_virtuals = []
            for b in w.all_bases(info.name):
                bm = w.classes[b].own_method(mi.sig_key)
                if bm is not None and bm.is_virtual:
                    base_virtuals.append(bm)
            if base_virtuals:
                if not same_type(mi.ret, base_virtuals[0].ret):
                    raise TypeCheckError(
                        mi.decl.loc,
                        f"'{info.name}::{mi.name}' overrides '{base_virtuals[0].cls}::{mi.name}' "
                        f"with different return type",
                    )
                mi.is_virtual = True
                mi.overrides = [bm.mangled for bm in base_virtuals]
            elif mi.decl.is_override:
                raise TypeCheckError(
                    mi.decl.loc,
                    f"'{info.name}::{mi.name}' marked override but no matching virtual base method",
                )
        # virtual destructors: derived dtor of a class whose base dtor is
        # virtual is itself virtual (linked when object model builds vtables)

    # -- free functions / globals ------------------------------------------------

    def register_free_function(self, d: FunctionDecl, mangled: str | None = None) -> None:
        w = self.world
        d.ret = self.resolve_type(d.ret, d.loc)
        if d.ret.kind in ("class", "array", "ref"):
            raise TypeCheckError(d.loc, f"return type {type_text(d.ret)} unsupported")
        for p in d.params:
            p.ty = self.resolve_type(p.ty, p.loc)
            self._check_param_type(p)
        if d.body is None:
            raise TypeCheckError(d.loc, f"function '{d.name}' must be defined")
        d.mangled = mangled or mangle_function(None, d.name, [p.ty for p in d.params])
        if d.name == NONDET_INT:
            raise TypeCheckError(d.loc, f"'{NONDET_INT}' is a reserved intrinsic")
        w.symtab.add(SymbolEntry("function", d.mangled, None, d.loc, d))
        w.functions[d.mangled] = d
        w.free_overloads.setdefault(d.name, []).append(d.mangled)

    def register_global(self, d: VarDecl) -> None:
        w = self.world
        if d.name in w.globals:
            raise TypeCheckError(d.loc, f"duplicate global '{d.name}'")
        d.ty = self.resolve_type(d.ty, d.loc)
        if d.ty.kind in ("void", "ref"):
            raise TypeCheckError(d.loc, f"global '{d.name}' has invalid type")
        w.globals[d.name] = d
        w.global_order.append(d.name)
        w.symtab.add(SymbolEntry("global", d.name, d.ty, d.loc, d))

    def check_global_init(self, d: VarDecl) -> None:
        scope = _Scope()
        if d.ty.kind == "class":
            self._resolve_ctor_call(d, scope)
        elif d.init is not None:
            ity = self.check_expr(d.init, scope)
            d.init = self.coerce(d.init, ity, d.ty, d.loc)

    # -- bodies -------------------------------------------------------------------

    def check_class_bodies(self, d: ClassDecl) -> None:
        info = self.world.classes[d.name]
        for m in list(info.ctors):
            self.check_ctor(info, m)
        if info.dtor is not None:
            self.check_method_body(info, info.dtor)
        for mi in info.methods:
            self.check_method_body(info, mi.decl)

    def check_ctor(self, info: ClassInfo, m: FunctionDecl) -> None:
        if getattr(m, "checked", False):
            return
        m.checked = True
        scope = _Scope()
        for p in m.params:
            if p.name:
                scope.declare(p.name, p.ty, p.loc)
        # classify initializer-list entries
        base_inits = []
        member_inits = []
        for nm, args, loc in m.init_list:
            target_base = None
            for bname, _virt in info.bases:
                if bname == nm or bname.split("<", 1)[0] == nm or bname == nm.replace(", ", ","):
                    target_base = bname
                    break
                # allow spelled-out template instance names
                if nm.replace(", ", ",") == bname.replace(", ", ","):
                    target_base = bname
                    break
            if target_base is not None:
                atys = [self.check_expr(a, scope) for a in args]
                ctor = self._find_ctor(target_base, args, atys, loc)
                base_inits.append((target_base, args, ctor, loc))
                continue
            fty = info.find_field(nm)
            if fty is None:
                raise TypeCheckError(loc, f"initializer '{nm}' is neither a base of nor a field in '{info.name}'")
            if fty.kind == "class":
                atys = [self.check_expr(a, scope) for a in args]
                ctor = self._find_ctor(fty.name, args, atys, loc)
                member_inits.append((nm, args, ctor, loc))
            else:
                if len(args) != 1:
                    raise TypeCheckError(loc, f"field initializer '{nm}' needs exactly one value")
                aty = self.check_expr(args[0], scope)
                args[0] = self.coerce(args[0], aty, fty, loc)
                member_inits.append((nm, args, None, loc))
        m.base_inits = base_inits
        m.member_inits = member_inits
        saved = (self.current_class, self.current_fn)
        self.current_class, self.current_fn = info.name, m
        try:
            self.check_block(m.body, _Scope(scope))
        finally:
            self.current_class, self.current_fn = saved

    def check_method_body(self, info: ClassInfo, m: FunctionDecl) -> None:
        if getattr(m, "checked", False):
            return
        m.checked = True
        scope = _Scope()
        for p in m.params:
            if p.name:
                scope.declare(p.name, p.ty, p.loc)
        saved = (self.current_class, self.current_fn)
        self.current_class, self.current_fn = info.name, m
        try:
            self.check_block(m.body, _Scope(scope))
        finally:
            self.current_class, self.current_fn = saved

    def check_function(self, d: FunctionDecl) -> None:
        if getattr(d, "checked", False):
            return
        d.checked = True
        scope = _Scope()
        for p in d.params:
            if p.name:
                scope.declare(p.name, p.ty, p.loc)
        saved = (self.current_class, self.current_fn)
        self.current_class, self.current_fn = None, d
        try:
            self.check_block(d.body, _Scope(scope))
        finally:
            self.current_class, self.current_fn = saved

    # -- statements -----------------------------------------------------------------

    def check_block(self, b: Block, scope: _Scope) -> None:
        for s in b.stmts:
            self.check_stmt(s, scope)

    def check_stmt(self, s: Stmt, scope: _Scope) -> None:
        if isinstance(s, Block):
            self.check_block(s, _Scope(scope))
        elif isinstance(s, VarDecl):
            s.ty = self.resolve_type(s.ty, s.loc)
            if s.ty.kind in ("void", "ref"):
                raise TypeCheckError(s.loc, f"variable '{s.name}' has invalid type {type_text(s.ty)}")
            if s.ty.kind == "class":
                self._resolve_ctor_call(s, scope)
            elif s.init is not None:
                ity = self.check_expr(s.init, scope)
                s.init = self.coerce(s.init, ity, s.ty, s.loc)
            elif s.ctor_args is not None:
                raise TypeCheckError(s.loc, f"'{type_text(s.ty)}' is not a class; use '=' initialization")
            scope.declare(s.name, s.ty, s.loc)
        elif isinstance(s, ExprStmt):
            self.check_expr(s.expr, scope)
        elif isinstance(s, IfStmt):
            s.cond = self.to_bool(s.cond, scope)
            self.check_stmt(s.then_body, _Scope(scope))
            if s.else_body is not None:
                self.check_stmt(s.else_body, _Scope(scope))
        elif isinstance(s, WhileStmt):
            s.cond = self.to_bool(s.cond, scope)
            self.check_stmt(s.body, _Scope(scope))
        elif isinstance(s, ForStmt):
            inner = _Scope(scope)
            if s.init is not None:
                self.check_stmt(s.init, inner)
            if s.cond is not None:
                s.cond = self.to_bool(s.cond, inner)
            if s.step is not None:
                self.check_expr(s.step, inner)
            self.check_stmt(s.body, _Scope(inner))
        elif isinstance(s, ReturnStmt):
            fn = self.current_fn
            assert fn is not None
            want = fn.ret if not (fn.is_ctor or fn.is_dtor) else VOID
            if want.kind == "void":
                if s.value is not None:
                    raise TypeCheckError(s.loc, "void function returns a value")
            else:
                if s.value is None:
                    raise TypeCheckError(s.loc, f"non-void function must return {type_text(want)}")
                vty = self.check_expr(s.value, scope)
                s.value = self.coerce(s.value, vty, want, s.loc)
        elif isinstance(s, AssertStmt):
            s.cond = self.to_bool(s.cond, scope)
        else:
            raise TypeCheckError(s.loc, f"unsupported statement {type(s).__name__}")

    def _resolve_ctor_call(self, s: VarDecl, scope: _Scope) -> None:
        args = list(s.ctor_args) if s.ctor_args is not None else []
        if s.init is not None:
            # `C a = b;` copy-initialization
            args = [s.init]
            s.init = None
        atys = [self.check_expr(a, scope) for a in args]
        ctor = self._find_ctor(s.ty.name, args, atys, s.loc)
        s.ctor_args = args
        s.ctor_mangled = ctor

    def _find_ctor(self, cls_name: str, args: list, atys: list, loc: SourceLoc) -> str:
        info = self.world.classes[cls_name]
        cands = []
        for c in info.ctors:
            if getattr(c, "is_base_variant", False):
                continue
            if len(c.params) != len(args):
                continue
            coerced = self._try_coerce_args(args, atys, [p.ty for p in c.params])
            if coerced is not None:
                cands.append((c, coerced))
        if not cands:
            raise TypeCheckError(
                loc, f"no matching constructor for '{cls_name}' with {len(args)} argument(s)"
            )
        if len(cands) > 1:
            raise TypeCheckError(loc, f"ambiguous constructor call for '{cls_name}'")
        c, coerced = cands[0]
        args[:] = coerced
        return c.mangled

    # -- expressions -------------------------------------------------------------------

    def check_expr(self, e: Expr, scope: _Scope) -> TypeRef:
        ty = self._check_expr(e, scope)
        e.ty = ty
        return ty

    def _check_expr(self, e: Expr, scope: _Scope) -> TypeRef:
        w = self.world
        if isinstance(e, IntLit):
            if e.value > INT_MAX:
                raise TypeCheckError(e.loc, f"integer literal {e.value} does not fit a 32-bit signed int")
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, NullLit):
            return TypeRef("ptr", inner=VOID)
        if isinstance(e, ThisExpr):
            if self.current_class is None:
                raise TypeCheckError(e.loc, "'this' outside of a method")
            return ptr_to(class_type(self.current_class))
        if isinstance(e, Ident):
            t = scope.lookup(e.name)
            if t is not None:
                e.binding = "local"
                return t
            if self.current_class is not None:
                fty = self._find_field_in_hierarchy(self.current_class, e.name)
                if fty is not None:
                    e.binding = "member"
                    return fty
            if e.name in w.globals:
                e.binding = "global"
                return w.globals[e.name].ty
            raise TypeCheckError(e.loc, f"unknown symbol '{e.name}'")
        if isinstance(e, Unary):
            return self._check_unary(e, scope)
        if isinstance(e, Binary):
            return self._check_binary(e, scope)
        if isinstance(e, AssignExpr):
            tty = self.check_expr(e.target, scope)
            self._require_lvalue(e.target)
            if tty.kind == "class":
                raise TypeCheckError(e.loc, "class-to-class assignment unsupported; use constructors")
            if tty.kind == "array":
                raise TypeCheckError(e.loc, "arrays cannot be assigned as a whole")
            vty = self.check_expr(e.value, scope)
            e.value = self.coerce(e.value, vty, tty, e.loc)
            return tty
        if isinstance(e, IndexExpr):
            bty = self.check_expr(e.base, scope)
            ity = self.check_expr(e.index, scope)
            if ity.kind != "int":
                raise TypeCheckError(e.loc, "array index must be int")
            if bty.kind == "array":
                return bty.inner
            if bty.kind == "ptr" and bty.inner.kind in ("int", "bool", "ptr"):
                return bty.inner
            raise TypeCheckError(e.loc, f"cannot index value of type {type_text(bty)}")
        if isinstance(e, Member):
            return self._check_member(e, scope)
        if isinstance(e, Call):
            return self._check_call(e, scope)
        if isinstance(e, TemplateId):
            raise TypeCheckError(e.loc, f"template '{e.name}' used outside a call")
        if isinstance(e, NewExpr):
            e.alloc_type = self.resolve_type(e.alloc_type, e.loc)
            t = e.alloc_type
            if t.kind == "class":
                args = list(e.args) if e.args is not None else []
                atys = [self.check_expr(a, scope) for a in args]
                e.ctor_mangled = self._find_ctor(t.name, args, atys, e.loc)
                e.args = args
            elif t.kind in ("int", "bool"):
                if e.args:
                    if len(e.args) != 1:
                        raise TypeCheckError(e.loc, "scalar new takes at most one initializer")
                    aty = self.check_expr(e.args[0], scope)
                    e.args[0] = self.coerce(e.args[0], aty, t, e.loc)
            else:
                raise TypeCheckError(e.loc, f"cannot allocate type {type_text(t)}")
            return ptr_to(t)
        if isinstance(e, DeleteExpr):
            oty = self.check_expr(e.operand, scope)
            if oty.kind != "ptr" or oty.inner.kind not in ("class", "int", "bool"):
                raise TypeCheckError(e.loc, f"delete requires a pointer to object, got {type_text(oty)}")
            return VOID
        if isinstance(e, CastExpr):
            e.target_type = self.resolve_type(e.target_type, e.loc)
            oty = self.check_expr(e.operand, scope)
            t = e.target_type
            if t.kind == "ptr" and oty.kind == "ptr":
                a, b = oty.inner, t.inner
                if a.kind == "class" and b.kind == "class":
                    if not (w.derives_from(a.name, b.name) or w.derives_from(b.name, a.name)):
                        raise TypeCheckError(e.loc, f"cast between unrelated classes {a.name} and {b.name}")
                elif not same_type(a, b):
                    raise TypeCheckError(e.loc, f"unsupported pointer cast {type_text(oty)} -> {type_text(t)}")
                return t
            if t.kind == "int" and oty.kind in ("int", "bool"):
                return t
            if same_type(t, oty):
                return t
            raise TypeCheckError(e.loc, f"unsupported cast {type_text(oty)} -> {type_text(t)}")
        if isinstance(e, ImplicitCast):
            # re-checking an annotated tree
            self.check_expr(e.operand, scope)
            return e.ty
        raise TypeCheckError(e.loc, f"unsupported expression {type(e).__name__}")

    def _find_field_in_hierarchy(self, cls_name: str, name: str) -> TypeRef | None:
        info = self.world.classes[cls_name]
        fty = info.find_field(name)
        if fty is not None:
            return fty
        for b in self.world.all_bases(cls_name):
            fty = self.world.classes[b].find_field(name)
            if fty is not None:
                return fty
        return None

    def _check_unary(self, e: Unary, scope: _Scope) -> TypeRef:
        if e.op == "-":
            if isinstance(e.operand, IntLit):
                # allow INT_MIN spelled as -2147483648
                if e.operand.value > 2**31:
                    raise TypeCheckError(e.loc, "integer literal does not fit a 32-bit signed int")
                e.operand.ty = INT
                return INT
            oty = self.check_expr(e.operand, scope)
            if oty.kind != "int":
                raise TypeCheckError(e.loc, f"unary '-' needs int, got {type_text(oty)}")
            return INT
        if e.op == "!":
            e.operand = self.to_bool(e.operand, scope)
            return BOOL
        if e.op == "*":
            oty = self.check_expr(e.operand, scope)
            if oty.kind != "ptr" or oty.inner.kind == "void":
                raise TypeCheckError(e.loc, f"cannot dereference {type_text(oty)}")
            return oty.inner
        if e.op == "&":
            oty = self.check_expr(e.operand, scope)
            self._require_lvalue(e.operand)
            if oty.kind == "array":
                return ptr_to(oty.inner)  # array-to-element-pointer decay
            return ptr_to(oty)
        raise AssertionError(e.op)

    def _check_binary(self, e: Binary, scope: _Scope) -> TypeRef:
        if e.op in ("&&", "||"):
            e.left = self.to_bool(e.left, scope)
            e.right = self.to_bool(e.right, scope)
            return BOOL
        lty = self.check_expr(e.left, scope)
        rty = self.check_expr(e.right, scope)
        if e.op in ("+", "-", "*", "/", "%"):
            if lty.kind == "int" and rty.kind == "int":
                return INT
            raise TypeCheckError(
                e.loc, f"no operator '{e.op}' for {type_text(lty)} and {type_text(rty)}"
            )
        if e.op in ("<", "<=", ">", ">="):
            if lty.kind == "int" and rty.kind == "int":
                return BOOL
            raise TypeCheckError(
                e.loc, f"no operator '{e.op}' for {type_text(lty)} and {type_text(rty)}"
            )
        assert e.op in ("==", "!="), e.op
        if lty.kind == rty.kind and lty.kind in ("int", "bool"):
            return BOOL
        if lty.kind == "ptr" and rty.kind == "ptr":
            a, b = lty.inner, rty.inner
            if same_type(a, b) or a.kind == "void" or b.kind == "void":
                return BOOL
            if a.kind == "class" and b.kind == "class" and (
                self.world.derives_from(a.name, b.name) or self.world.derives_from(b.name, a.name)
            ):
                # compare through the common base view
                if self.world.derives_from(a.name, b.name):
                    e.left = self.coerce(e.left, lty, rty, e.loc)
                else:
                    e.right = self.coerce(e.right, rty, lty, e.loc)
                return BOOL
        raise TypeCheckError(e.loc, f"no operator '{e.op}' for {type_text(lty)} and {type_text(rty)}")

    def _check_member(self, e: Member, scope: _Scope) -> TypeRef:
        bty = self.check_expr(e.base, scope)
        cls = self._receiver_class(bty, e.arrow, e.loc)
        fty = self._find_field_in_hierarchy(cls, e.name)
        if fty is None:
            raise TypeCheckError(e.loc, f"class '{cls}' has no field '{e.name}'")
        e.receiver_class = cls
        return fty

    def _receiver_class(self, bty: TypeRef, arrow: bool, loc: SourceLoc) -> str:
        if arrow:
            if bty.kind != "ptr" or bty.inner.kind != "class":
                raise TypeCheckError(loc, f"'->' needs a pointer to class, got {type_text(bty)}")
            return bty.inner.name
        if bty.kind == "class":
            return bty.name
        if bty.kind == "ref" and bty.inner.kind == "class":
            return bty.inner.name
        raise TypeCheckError(loc, f"'.' needs a class object, got {type_text(bty)}")

    def _check_call(self, e: Call, scope: _Scope) -> TypeRef:
        w = self.world
        atys = [self.check_expr(a, scope) for a in e.args]
        callee = e.callee
        if isinstance(callee, Ident):
            name = callee.name
            if name == NONDET_INT:
                if e.args:
                    raise TypeCheckError(e.loc, f"{NONDET_INT} takes no arguments")
                e.dispatch = ("nondet",)
                return INT
            # unqualified method call inside a class
            if self.current_class is not None and w.find_method(self.current_class, name, len(e.args)):
                return self._resolve_method_call(e, self.current_class, name, atys, implicit_this=True, virtual_ok=True)
            cand = self._match_free(name, e.args, atys)
            if cand is not None:
                mangled, coerced, decl = cand
                e.args[:] = coerced
                e.dispatch = ("free", mangled)
                return decl.ret
            if w.templates is not None:
                got = w.templates.resolve_template_call(name, [], e.args, atys, e.loc)
                if got is not None:
                    mangled, coerced, ret = got
                    e.args[:] = coerced
                    e.dispatch = ("free", mangled)
                    return ret
            raise TypeCheckError(e.loc, f"symbol '{name}' not found")
        if isinstance(callee, TemplateId):
            if w.templates is None:
                raise TypeCheckError(e.loc, f"template call '{callee.name}' without template engine")
            got = w.templates.resolve_template_call(callee.name, callee.targs, e.args, atys, e.loc)
            if got is None:
                raise TypeCheckError(e.loc, f"symbol '{callee.name}' not found")
            mangled, coerced, ret = got
            e.args[:] = coerced
            callee.resolved = mangled
            e.dispatch = ("free", mangled)
            return ret
        if isinstance(callee, Member):
            bty = self.check_expr(callee.base, scope)
            cls = self._receiver_class(bty, callee.arrow, callee.loc)
            dynamic = callee.arrow or bty.kind == "ref"
            return self._resolve_method_call(e, cls, callee.name, atys, implicit_this=False, virtual_ok=dynamic)
        raise TypeCheckError(e.loc, "call target is not callable")

    def _resolve_method_call(
        self, e: Call, cls: str, name: str, atys: list, implicit_this: bool, virtual_ok: bool
    ) -> TypeRef:
        w = self.world
        cands = w.find_method(cls, name, len(e.args))
        viable = []
        for mi in cands:
            coerced = self._try_coerce_args(e.args, atys, mi.param_tys)
            if coerced is not None:
                viable.append((mi, coerced))
        if not viable:
            raise TypeCheckError(e.loc, f"no matching method '{name}' on class '{cls}'")
        if len(viable) > 1:
            raise TypeCheckError(e.loc, f"ambiguous call to '{cls}::{name}'")
        mi, coerced = viable[0]
        e.args[:] = coerced
        if mi.is_virtual and virtual_ok:
            e.dispatch = ("virtual", cls, mi.sig_key)
        else:
            impl = w.final_overrider(cls, mi.sig_key) if mi.is_virtual else mi
            e.dispatch = ("method", impl.mangled, cls, impl.cls)
        e.implicit_this = implicit_this
        return mi.ret

    def _match_free(self, name: str, args: list, atys: list):
        w = self.world
        for mangled in w.free_overloads.get(name, []):
            decl = w.functions[mangled]
            if len(decl.params) != len(args):
                continue
            coerced = self._try_coerce_args(args, atys, [p.ty for p in decl.params])
            if coerced is not None:
                return mangled, coerced, decl
        return None

    def _try_coerce_args(self, args: list, atys: list, ptys: list):
        if len(args) != len(ptys):
            return None
        out = []
        for a, aty, pty in zip(args, atys, ptys):
            c = self._try_coerce(a, aty, pty)
            if c is None:
                return None
            out.append(c)
        return out

    def _try_coerce(self, a: Expr, aty: TypeRef, pty: TypeRef):
        if pty.kind == "ref":
            if same_type(aty, pty.inner) and self._is_lvalue(a):
                return a
            return None
        if same_type(aty, pty):
            return a
        if pty.kind == "ptr" and aty.kind == "ptr":
            if aty.inner.kind == "void" and isinstance(a, NullLit):
                cast = ImplicitCast(kind="null_to_ptr", operand=a, loc=a.loc)
                cast.ty = pty
                return cast
            if (
                aty.inner.kind == "class"
                and pty.inner.kind == "class"
                and self.world.derives_from(aty.inner.name, pty.inner.name)
            ):
                cast = ImplicitCast(kind="ptr_up", operand=a, loc=a.loc)
                cast.ty = pty
                return cast
        if pty.kind == "ptr" and isinstance(a, NullLit):
            cast = ImplicitCast(kind="null_to_ptr", operand=a, loc=a.loc)
            cast.ty = pty
            return cast
        return None

    def coerce(self, e: Expr, ety: TypeRef, want: TypeRef, loc: SourceLoc) -> Expr:
        got = self._try_coerce(e, ety, want)
        if got is None:
            raise TypeCheckError(loc, f"cannot convert {type_text(ety)} to {type_text(want)}")
        return got

    def to_bool(self, e: Expr, scope: _Scope) -> Expr:
        ty = self.check_expr(e, scope)
        if ty.kind == "bool":
            return e
        if ty.kind == "int":
            if isinstance(e, ImplicitCast) and e.kind == "to_bool":
                return e
            cast = ImplicitCast(kind="to_bool", operand=e, loc=e.loc)
            cast.ty = BOOL
            return cast
        if ty.kind == "ptr":
            cast = ImplicitCast(kind="to_bool", operand=e, loc=e.loc)
            cast.ty = BOOL
            return cast
        raise TypeCheckError(e.loc, f"condition must be bool or int, got {type_text(ty)}")

    def _is_lvalue(self, e: Expr) -> bool:
        if isinstance(e, Ident):
            return True
        if isinstance(e, Member):
            return True
        if isinstance(e, IndexExpr):
            return True
        if isinstance(e, Unary) and e.op == "*":
            return True
        return False

    def _require_lvalue(self, e: Expr) -> None:
        if not self._is_lvalue(e):
            raise TypeCheckError(e.loc, "expression is not assignable")

    def resolve_typedef_probe(self, name: str, _seen=None) -> None:
        seen = _seen or []
        if name in seen:
            raise TypeCheckError(
                self.world.symtab.lookup(name).loc, f"circular typedef '{' -> '.join(seen + [name])}'"
            )
        t = self.world.typedefs[name]
        while t.kind in ("ptr", "ref", "array"):
            t = t.inner
        if t.kind == "named" and t.name in self.world.typedefs:
            self.resolve_typedef_probe(t.name, seen + [name])


# ---------------------------------------------------------------------------
# Constant expressions
# ---------------------------------------------------------------------------


def const_eval_int(e: Expr, env: dict, loc: SourceLoc) -> int:
    """Evaluate a compile-time integer expression (template args, array lengths)."""
    from .diagnostics import TemplateError

    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Ident):
        if e.name in env:
            return env[e.name]
        raise TemplateError(e.loc, f"'{e.name}' is not a constant expression")
    if isinstance(e, Unary) and e.op == "-":
        return -const_eval_int(e.operand, env, loc)
    if isinstance(e, Binary):
        l = const_eval_int(e.left, env, loc)
        r = const_eval_int(e.right, env, loc)
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if e.op == "/":
            if r == 0:
                raise TemplateError(e.loc, "division by zero in constant expression")
            q = abs(l) // abs(r)
            return q if (l >= 0) == (r >= 0) else -q
        if e.op == "%":
            if r == 0:
                raise TemplateError(e.loc, "division by zero in constant expression")
            q = abs(l) // abs(r)
            q = q if (l >= 0) == (r >= 0) else -q
            return l - q * r
    raise TypeCheckError(getattr(e, "loc", loc), "expression is not an integer constant")


# ---------------------------------------------------------------------------
# Default member synthesis
# ---------------------------------------------------------------------------


def synthesize_class_defaults(world: World, d: ClassDecl) -> None:
    """Add default constructor, copy constructor, and destructor when missing."""
    info = world.classes[d.name]
    cls_ptr = ptr_to(class_type(d.name))
    if not info.ctors:
        ctor = FunctionDecl(
            name=d.name,
            ret=VOID,
            params=[],
            body=Block(stmts=[], loc=d.loc),
            is_ctor=True,
            owner=d.name,
            synthesized=True,
            loc=d.loc,
        )
        ctor.mangled = mangle_function(d.name, d.name, [cls_ptr])
        ctor.base_inits = []
        ctor.member_inits = []
        ctor.checked = True
        info.ctors.append(ctor)
        d.members.append(ctor)
        world.functions[ctor.mangled] = ctor
        world.symtab.add(SymbolEntry("function", ctor.mangled, None, d.loc, ctor))
    if not _has_copy_ctor(world, info):
        other = Param(TypeRef("ref", inner=class_type(d.name)), "other", loc=d.loc)
        copy = FunctionDecl(
            name=d.name,
            ret=VOID,
            params=[other],
            body=Block(stmts=[], loc=d.loc),
            is_ctor=True,
            owner=d.name,
            synthesized=True,
            loc=d.loc,
        )
        copy.mangled = mangle_function(d.name, d.name, [cls_ptr, other.ty])
        copy.base_inits = []
        copy.member_inits = []
        copy.is_copy_ctor = True
        copy.checked = True
        info.ctors.append(copy)
        d.members.append(copy)
        world.functions[copy.mangled] = copy
        world.symtab.add(SymbolEntry("function", copy.mangled, None, d.loc, copy))
    if info.dtor is None:
        dtor = FunctionDecl(
            name="~" + d.name,
            ret=VOID,
            params=[],
            body=Block(stmts=[], loc=d.loc),
            is_dtor=True,
            owner=d.name,
            synthesized=True,
            loc=d.loc,
        )
        dtor.mangled = mangle_function(d.name, "~" + d.name, [cls_ptr])
        dtor.checked = True
        info.dtor = dtor
        d.members.append(dtor)
        world.functions[dtor.mangled] = dtor
        world.symtab.add(SymbolEntry("function", dtor.mangled, None, d.loc, dtor))


def _has_copy_ctor(world: World, info: ClassInfo) -> bool:
    for c in info.ctors:
        if len(c.params) == 1:
            t = c.params[0].ty
            if t.kind == "ref" and t.inner.kind == "class" and t.inner.name == info.name:
                return True
    return False


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def typecheck(program: Program) -> tuple[Program, SymbolTable]:
    """Type check a parsed program, instantiating templates on demand."""
    from .templates import TemplateWorld

    world = World()
    world.templates = TemplateWorld(world)
    sema = Sema(world)
    world.templates.sema = sema
    symtab = sema.check_program(program)
    program.world = world
    return program, symtab


def synthesize_defaults(program: Program) -> Program:
    """Ensure every class has default ctor, copy ctor, and dtor (idempotent)."""
    world: World = program.world
    for name in list(world.classes):
        synthesize_class_defaults(world, world.classes[name].decl)
    return program
