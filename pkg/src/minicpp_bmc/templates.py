"""Template registration, instantiation, and monomorphization.

Instantiation is demand-driven from the type checker: resolving `X<1234>`
or a call `foo<5678>(bring)` lands here.  Friend function templates
defined inside a class template are injected into a file-level "injected"
scope when the enclosing class is instantiated; calls search ordinary
function templates first, injected friends second.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .ast_nodes import (
    ClassDecl,
    Expr,
    FunctionDecl,
    Ident,
    IntLit,
    Program,
    TemplateDecl,
    TypeRef,
    class_type,
    same_type,
    type_text,
)
from .diagnostics import SourceLoc, TemplateError, TypeCheckError
from .sema import (
    INT_MAX,
    INT_MIN,
    Sema,
    World,
    const_eval_int,
    synthesize_class_defaults,
)

MAX_INSTANTIATION_DEPTH = 64


def render_targ(a) -> str:
    if isinstance(a, TypeRef):
        return type_text(a)
    return str(a)


def instance_name(name: str, args: list) -> str:
    return f"{name}<{','.join(render_targ(a) for a in args)}>"


@dataclass
class InjectedFriend:
    enclosing: str  # instantiated class name
    template: TemplateDecl  # enclosing bindings already substituted in


@dataclass
class _ClassTemplate:
    primary: TemplateDecl | None = None
    specs: list = field(default_factory=list)  # TemplateDecl with spec_args


class TemplateWorld:
    def __init__(self, world: World):
        self.world = world
        self.sema: Sema | None = None
        self.class_templates: dict[str, _ClassTemplate] = {}
        self.func_templates: dict[str, list[TemplateDecl]] = {}
        self.func_specs: dict[str, list[TemplateDecl]] = {}
        self.injected: dict[str, list[InjectedFriend]] = {}
        self.stack: list[str] = []
        self.created: list = []  # instantiated decls, creation order
        self.func_instances: dict[tuple, str] = {}  # (template id, args) -> mangled

    # -- registration --------------------------------------------------------

    def register(self, td: TemplateDecl) -> None:
        inner = td.decl
        if isinstance(inner, ClassDecl):
            entry = self.class_templates.setdefault(inner.name, _ClassTemplate())
            if td.spec_args is not None:
                entry.specs.append(td)
            else:
                if entry.primary is not None:
                    raise TemplateError(td.loc, f"duplicate class template '{inner.name}'")
                if self._has_pack_like(td):
                    raise TemplateError(td.loc, "unsupported template parameter form")
                entry.primary = td
        elif isinstance(inner, FunctionDecl):
            if td.spec_args is not None:
                self.func_specs.setdefault(inner.name, []).append(td)
            else:
                self.func_templates.setdefault(inner.name, []).append(td)
        else:
            raise TemplateError(td.loc, "unsupported template declaration")

    def _has_pack_like(self, td: TemplateDecl) -> bool:
        return False

    def register_friend(self, enclosing: str, td: TemplateDecl, enclosing_bindings: dict) -> None:
        inner = td.decl
        if not isinstance(inner, FunctionDecl) or not inner.is_friend:
            raise TemplateError(td.loc, "only friend function templates are supported inside classes")
        self.injected.setdefault(inner.name, []).append(InjectedFriend(enclosing, td))

    def is_class_template(self, name: str) -> bool:
        return name in self.class_templates

    # -- class instantiation ----------------------------------------------------

    def instantiate_class(self, name: str, raw_args: list, loc: SourceLoc) -> str:
        if name not in self.class_templates:
            raise TemplateError(loc, f"'{name}' is not a class template")
        entry = self.class_templates[name]
        primary = entry.primary
        if primary is None:
            raise TemplateError(loc, f"class template '{name}' has no primary definition")
        args = self._resolve_args(primary.params, raw_args, loc, name)
        mangled = instance_name(name, args)
        if mangled in self.world.classes:
            return mangled
        if len(self.stack) >= MAX_INSTANTIATION_DEPTH:
            raise TemplateError(
                loc, f"template instantiation depth exceeds {MAX_INSTANTIATION_DEPTH} at '{mangled}'"
            )
        chosen = primary
        bindings = dict(zip([p.name for p in primary.params], args))
        for spec in entry.specs:
            spec_args = self._resolve_args_literal(spec.spec_args, loc)
            if len(spec_args) == len(args) and all(_targ_same(a, b) for a, b in zip(spec_args, args)):
                chosen = spec
                bindings = {}
                break
        decl = substitute(chosen.decl, bindings, self_name=name, self_args=args, inst_name=mangled)
        decl.name = mangled
        decl.targs = list(args)
        sema = self.sema
        self.stack.append(mangled)
        try:
            # bases and fields resolve inside the cycle window: they are the
            # only constructs that can form genuine circular dependencies
            sema.register_class(decl)
            self.world.classes[mangled].template_origin = (name, tuple(args))
            sema.resolve_class(decl)
            sema.link_methods(decl)
            synthesize_class_defaults(self.world, decl)
            self.created.append(decl)
        finally:
            self.stack.pop()
        self.stack.append(mangled)
        try:
            sema.check_class_bodies(decl)
        finally:
            self.stack.pop()
        return mangled

    def _resolve_args(self, params: list, raw_args: list, loc: SourceLoc, tname: str) -> list:
        if len(raw_args) > len(params):
            raise TemplateError(loc, f"too many template arguments for '{tname}'")
        args: list = []
        for i, p in enumerate(params):
            if i < len(raw_args):
                args.append(self._canon_arg(p, raw_args[i], loc))
            elif p.default is not None:
                default = substitute_targ(p.default, dict(zip([q.name for q in params[:i]], args)))
                args.append(self._canon_arg(p, default, loc))
            else:
                raise TemplateError(loc, f"missing template argument for parameter '{p.name}' of '{tname}'")
        return args

    def _canon_arg(self, p, raw, loc: SourceLoc):
        if p.kind == "type":
            if not isinstance(raw, TypeRef):
                raise TemplateError(loc, f"template parameter '{p.name}' expects a type")
            return self.sema.resolve_type(raw, loc)
        if isinstance(raw, TypeRef):
            raise TemplateError(loc, f"template parameter '{p.name}' expects an integer constant")
        v = const_eval_int(raw, {}, loc)
        if not (INT_MIN <= v <= INT_MAX):
            raise TemplateError(loc, f"non-type template argument {v} does not fit a 32-bit signed int")
        return v

    def _resolve_args_literal(self, raw_args: list, loc: SourceLoc) -> list:
        out = []
        for a in raw_args:
            if isinstance(a, TypeRef):
                out.append(self.sema.resolve_type(a, loc))
            else:
                out.append(const_eval_int(a, {}, loc))
        return out

    # -- function template calls ---------------------------------------------------

    def resolve_template_call(self, name: str, explicit_targs: list, args: list, atys: list, loc: SourceLoc):
        """Resolve a call to a function template; returns (mangled, coerced args, ret) or None."""
        # explicit full specializations first
        for spec in self.func_specs.get(name, []):
            spec_args = self._resolve_args_literal(spec.spec_args, loc)
            if explicit_targs:
                given = self._resolve_args_literal(explicit_targs, loc)
                if len(given) == len(spec_args) and all(_targ_same(a, b) for a, b in zip(given, spec_args)):
                    got = self._try_candidate(spec.decl, [], spec_args, args, atys, loc, spec, presubstituted=True)
                    if got is not None:
                        return got
        for td in self.func_templates.get(name, []):
            got = self._try_template(td, explicit_targs, args, atys, loc)
            if got is not None:
                return got
        for inj in self.injected.get(name, []):
            got = self._try_template(inj.template, explicit_targs, args, atys, loc, enclosing=inj.enclosing)
            if got is not None:
                return got
        return None

    def _try_template(self, td: TemplateDecl, explicit_targs, args, atys, loc, enclosing: str | None = None):
        params = td.params
        if len(explicit_targs) > len(params):
            return None
        bound: dict[str, object] = {}
        for p, raw in zip(params, explicit_targs):
            try:
                bound[p.name] = self._canon_arg(p, raw, loc)
            except TemplateError:
                return None
        fn: FunctionDecl = td.decl
        if len(fn.params) != len(args):
            return None
        # deduce the rest from argument types
        for p, aty in zip(fn.params, atys):
            pat = p.ty
            if not _unify(pat, aty, {q.name: q.kind for q in params}, bound, self.world):
                return None
        final_args = []
        for p in params:
            if p.name in bound:
                final_args.append(bound[p.name])
            elif p.default is not None:
                d = substitute_targ(p.default, bound)
                final_args.append(self._canon_arg(p, d, loc))
                bound[p.name] = final_args[-1]
            else:
                return None
        return self._try_candidate(fn, params, final_args, args, atys, loc, td, enclosing=enclosing)

    def _try_candidate(
        self, fn: FunctionDecl, params, final_args, args, atys, loc, td, enclosing=None, presubstituted=False
    ):
        bindings = dict(zip([p.name for p in params], final_args))
        sema = self.sema
        # compute the instantiated parameter types and test viability
        ptys = []
        for p in fn.params:
            t = substitute_type(p.ty, bindings) if not presubstituted else p.ty
            try:
                ptys.append(sema.resolve_type(t, loc))
            except TypeCheckError:
                return None
        coerced = sema._try_coerce_args(args, atys, ptys)
        if coerced is None:
            return None
        key = (id(td), tuple(_targ_key(a) for a in final_args))
        if key in self.func_instances:
            mangled = self.func_instances[key]
            return mangled, coerced, self.world.functions[mangled].ret
        base = instance_name(fn.name, final_args)
        mangled = base
        if mangled in self.world.functions:
            mangled = f"{enclosing}::{base}" if enclosing else f"{base}@{len(self.func_instances)}"
        if len(self.stack) >= MAX_INSTANTIATION_DEPTH:
            raise TemplateError(loc, f"template instantiation depth exceeds {MAX_INSTANTIATION_DEPTH} at '{mangled}'")
        clone = substitute(fn, bindings, self_name=None, self_args=None, inst_name=None)
        clone.name = base
        clone.is_friend = False
        self.func_instances[key] = mangled
        self.stack.append(mangled)
        try:
            sema.register_free_function(clone, mangled=mangled)
            self.created.append(clone)
            sema.check_function(clone)
        except BaseException:
            del self.func_instances[key]
            raise
        finally:
            self.stack.pop()
        return mangled, coerced, clone.ret


def _targ_same(a, b) -> bool:
    if isinstance(a, TypeRef) and isinstance(b, TypeRef):
        return same_type(a, b)
    if isinstance(a, TypeRef) or isinstance(b, TypeRef):
        return False
    return a == b


def _targ_key(a):
    return type_text(a) if isinstance(a, TypeRef) else a


def _unify(pattern: TypeRef, arg: TypeRef, param_kinds: dict, bound: dict, world: World) -> bool:
    """First-order matching of a parameter type pattern against an argument type."""
    if pattern is None or arg is None:
        return pattern is arg
    if pattern.kind == "named":
        if pattern.name in param_kinds and not pattern.targs:
            if param_kinds[pattern.name] != "type":
                return False
            if pattern.name in bound:
                return isinstance(bound[pattern.name], TypeRef) and same_type(bound[pattern.name], arg)
            bound[pattern.name] = arg
            return True
        if pattern.targs:
            # class template pattern, e.g. Box<T>
            if arg.kind != "class":
                return False
            origin = world.classes[arg.name].template_origin if arg.name in world.classes else None
            if origin is None or origin[0] != pattern.name or len(origin[1]) != len(pattern.targs):
                return False
            for pat_a, got in zip(pattern.targs, origin[1]):
                if isinstance(pat_a, TypeRef):
                    if not isinstance(got, TypeRef) or not _unify(pat_a, got, param_kinds, bound, world):
                        return False
                elif isinstance(pat_a, Ident) and pat_a.name in param_kinds:
                    if isinstance(got, TypeRef):
                        return False
                    if pat_a.name in bound:
                        if bound[pat_a.name] != got:
                            return False
                    else:
                        bound[pat_a.name] = got
                elif isinstance(pat_a, IntLit):
                    if got != pat_a.value:
                        return False
                else:
                    return False
            return True
        # concrete named type: exact match after resolution is checked later
        return arg.kind == "class" and (arg.name == pattern.name)
    if pattern.kind in ("int", "bool", "void"):
        return arg.kind == pattern.kind
    if pattern.kind == "class":
        return arg.kind == "class" and arg.name == pattern.name
    if pattern.kind == "ptr":
        return arg.kind == "ptr" and _unify(pattern.inner, arg.inner, param_kinds, bound, world)
    if pattern.kind == "ref":
        # reference parameters bind to lvalues of the referee type
        return _unify(pattern.inner, arg, param_kinds, bound, world)
    if pattern.kind == "array":
        return arg.kind == "array" and arg.length == pattern.length and _unify(
            pattern.inner, arg.inner, param_kinds, bound, world
        )
    return False


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

_EXPR_RESET = {"ty": None}


def substitute_type(t: TypeRef, bindings: dict, self_name=None, self_args=None, inst_name=None) -> TypeRef:
    if t is None:
        return None
    if t.kind == "named":
        if t.name in bindings and not t.targs:
            b = bindings[t.name]
            if not isinstance(b, TypeRef):
                raise TemplateError(NO_LOC_SAFE, f"'{t.name}' bound to a value, used as a type")
            return b
        new_targs = [substitute_targ(a, bindings, self_name, self_args, inst_name) for a in t.targs]
        if self_name is not None and t.name == self_name:
            if not t.targs:
                return class_type(inst_name)
            if len(new_targs) == len(self_args) and all(
                _targ_same(_canonical_probe(a), b) for a, b in zip(new_targs, self_args)
            ):
                return class_type(inst_name)
        return TypeRef("named", name=t.name, targs=new_targs)
    if t.kind in ("int", "bool", "void", "class"):
        return t
    out = TypeRef(
        t.kind,
        name=t.name,
        inner=substitute_type(t.inner, bindings, self_name, self_args, inst_name),
        length=t.length,
        length_expr=substitute(t.length_expr, bindings, self_name, self_args, inst_name)
        if t.length_expr is not None
        else None,
    )
    return out


def _canonical_probe(a):
    if isinstance(a, IntLit):
        return a.value
    if isinstance(a, Expr):
        try:
            return const_eval_int(a, {}, a.loc)
        except Exception:
            return a
    return a


def substitute_targ(a, bindings: dict, self_name=None, self_args=None, inst_name=None):
    if isinstance(a, TypeRef):
        return substitute_type(a, bindings, self_name, self_args, inst_name)
    return substitute(a, bindings, self_name, self_args, inst_name)


NO_LOC_SAFE = SourceLoc("<subst>", 1, 1)


def substitute(node, bindings: dict, self_name=None, self_args=None, inst_name=None):
    """Deep-clone an AST subtree replacing template parameters."""
    if node is None:
        return None
    if isinstance(node, TypeRef):
        return substitute_type(node, bindings, self_name, self_args, inst_name)
    if isinstance(node, Ident) and node.name in bindings and not isinstance(bindings[node.name], TypeRef):
        return IntLit(value=bindings[node.name], loc=node.loc)
    if isinstance(node, TemplateDecl):
        shadowed = {k: v for k, v in bindings.items() if k not in {p.name for p in node.params}}
        inner = substitute(node.decl, shadowed, self_name, self_args, inst_name)
        params = []
        for p in node.params:
            q = dataclasses.replace(p)
            if q.default is not None:
                q.default = substitute_targ(q.default, shadowed, self_name, self_args, inst_name)
            params.append(q)
        clone = TemplateDecl(
            params=params,
            decl=inner,
            spec_args=[substitute_targ(a, shadowed, self_name, self_args, inst_name) for a in node.spec_args]
            if node.spec_args is not None
            else None,
            loc=node.loc,
        )
        return clone
    if isinstance(node, (list, tuple)):
        out = [substitute(x, bindings, self_name, self_args, inst_name) for x in node]
        return type(node)(out) if isinstance(node, tuple) else out
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        kwargs = {}
        for f in dataclasses.fields(node):
            v = getattr(node, f.name)
            if f.name == "loc":
                kwargs[f.name] = v
            elif f.name == "init_list":
                kwargs[f.name] = [
                    (nm, [substitute(a, bindings, self_name, self_args, inst_name) for a in args], lc)
                    for nm, args, lc in v
                ]
            else:
                kwargs[f.name] = substitute(v, bindings, self_name, self_args, inst_name)
        clone = type(node)(**kwargs)
        if isinstance(clone, Expr):
            clone.ty = None
        if isinstance(clone, FunctionDecl):
            clone.mangled = ""
            clone.owner = None
        return clone
    return node


# ---------------------------------------------------------------------------
# Monomorphization entry point
# ---------------------------------------------------------------------------


def monomorphize(program: Program) -> Program:
    """Produce a template-free typed program (idempotent)."""
    if getattr(program, "monomorphized", False):
        return program
    world: World | None = getattr(program, "world", None)
    if world is None:
        from .sema import typecheck

        program, _ = typecheck(program)
        world = program.world
    if "main" not in world.free_overloads:
        raise TypeCheckError(program.loc, "no 'main' function defined")
    tw: TemplateWorld = world.templates
    decls = [d for d in program.decls if not isinstance(d, TemplateDecl)]
    created = list(tw.created) if tw is not None else []
    # instantiated ctors/dtors/methods live inside their ClassDecl members;
    # instantiated free functions are standalone decls.  Friend template
    # members were materialized into the injected scope, so the residual
    # declarations (which still mention template parameters) are dropped.
    for d in decls + created:
        if isinstance(d, ClassDecl):
            d.members = [m for m in d.members if not isinstance(m, TemplateDecl)]
    new_program = Program(decls=decls + created, loc=program.loc)
    new_program.world = world
    new_program.monomorphized = True
    validate_resolution(new_program, world)
    return new_program


def validate_resolution(program: Program, world: World) -> None:
    """Every call and identifier in the final tree must resolve."""

    def walk_expr(e):
        if e is None:
            return
        if isinstance(e, (IntLit,)):
            return
        if dataclasses.is_dataclass(e):
            if hasattr(e, "dispatch"):
                d = e.dispatch
                if d[0] in ("free", "method") and d[1] not in world.functions:
                    raise TypeCheckError(getattr(e, "loc", None), f"unresolved call target '{d[1]}'")
            for f in dataclasses.fields(e):
                v = getattr(e, f.name)
                if isinstance(v, (list, tuple)):
                    for x in v:
                        walk_expr(x)
                elif dataclasses.is_dataclass(v) and not isinstance(v, TypeRef):
                    walk_expr(v)

    for fn in world.functions.values():
        if fn.body is not None:
            walk_expr(fn.body)
