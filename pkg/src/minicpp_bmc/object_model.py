"""Per-class object model: slot layouts, vtables, thunks, vptr injection.

Layouts are slot-based: every field, embedded subobject, and vptr takes one
addressable slot; no byte offsets exist anywhere.  A class publishes one
vptr slot per primary chain of polymorphic views; virtual bases are laid
out once at the end of the most-derived object and contribute exactly one
shared vptr slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ast_nodes import Program, TypeRef
from .diagnostics import LayoutError, SourceLoc
from .sema import MethodInfo, World, mangle_type

DTOR_KEY = ("~dtor", ())


@dataclass
class Slot:
    name: str
    kind: str  # 'vptr' | 'field'
    ty: TypeRef | None  # field slots only
    origin: str  # class that introduced the slot


@dataclass
class ClassLayout:
    cls: str
    slots: list = field(default_factory=list)  # Slot
    base_offsets: dict = field(default_factory=dict)  # subobject class -> slot offset
    vbases: list = field(default_factory=list)
    vptr_views: dict = field(default_factory=dict)  # view class -> vptr slot offset
    own_field_offsets: dict = field(default_factory=dict)  # (owner, field) -> offset in cls layout

    @property
    def size(self) -> int:
        return len(self.slots)

    def field_slot(self, owner: str, name: str) -> int:
        return self.own_field_offsets[(owner, name)]


@dataclass
class VTableEntry:
    sig_key: tuple
    display: str  # e.g. "doit"
    target_kind: str  # 'direct' | 'thunk'
    target: str  # mangled function or thunk name


@dataclass
class VTable:
    view: str
    derived: str
    entries: list = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"{self.view}@{self.derived}"


@dataclass
class Thunk:
    name: str
    view: str  # receiver's static view class
    delta: int  # slot adjustment applied to the receiver
    target: str  # mangled overriding method
    target_cls: str
    sig_key: tuple


@dataclass
class ObjectModel:
    layouts: dict = field(default_factory=dict)  # cls -> ClassLayout
    vtables: dict = field(default_factory=dict)  # (view, derived) -> VTable
    thunks: dict = field(default_factory=dict)  # thunk name -> Thunk
    tags: dict = field(default_factory=dict)  # cls -> dynamic type tag
    method_lists: dict = field(default_factory=dict)  # view -> list of sig_key

    def dispatch_candidates(self, world: World, view: str) -> list:
        return [c for c in world.classes if world.derives_from(c, view)]


# ---------------------------------------------------------------------------
# Hierarchy predicates
# ---------------------------------------------------------------------------


def is_polymorphic(world: World, cls: str, _memo=None) -> bool:
    memo = _memo if _memo is not None else {}
    if cls in memo:
        return memo[cls]
    info = world.classes[cls]
    poly = any(m.is_virtual for m in info.methods) or (
        info.dtor is not None and info.dtor.is_virtual
    )
    if not poly:
        poly = any(is_polymorphic(world, b, memo) for b, _ in info.bases)
    memo[cls] = poly
    return poly


def has_virtual_dtor(world: World, cls: str) -> bool:
    info = world.classes[cls]
    if info.dtor is not None and info.dtor.is_virtual:
        return True
    return any(has_virtual_dtor(world, b) for b, _ in info.bases)


def collect_vbases(world: World, cls: str) -> list[str]:
    out: list[str] = []

    def walk(c: str) -> None:
        for b, virt in world.classes[c].bases:
            walk(b)
            if virt and b not in out:
                out.append(b)

    walk(cls)
    return out


def nv_closure(world: World, cls: str) -> set[str]:
    """Classes embedded in cls's non-virtual part (fixed relative offsets)."""
    out = {cls}
    for b, virt in world.classes[cls].bases:
        if not virt:
            out |= nv_closure(world, b)
    return out


def primary_base(world: World, cls: str) -> str | None:
    """First direct non-virtual polymorphic base shares its vptr with cls."""
    for b, virt in world.classes[cls].bases:
        if not virt and is_polymorphic(world, b):
            return b
    return None


def _nv_occurrences(world: World, cls: str, out: dict) -> None:
    for b, virt in world.classes[cls].bases:
        if not virt:
            out[b] = out.get(b, 0) + 1
            _nv_occurrences(world, b, out)


def check_hierarchy(world: World, cls: str, loc: SourceLoc) -> None:
    occ: dict[str, int] = {}
    _nv_occurrences(world, cls, occ)
    vb = set(collect_vbases(world, cls))
    for x, n in occ.items():
        if x in vb:
            raise LayoutError(loc, f"crossed diamond hierarchy unsupported: '{x}' is reached both virtually and non-virtually from '{cls}'")
        if n > 1:
            raise LayoutError(loc, f"duplicate non-virtual base subobject '{x}' in '{cls}' is unsupported")
    # virtual bases of virtual bases that are also reached non-virtually
    for v in vb:
        inner_occ: dict[str, int] = {}
        _nv_occurrences(world, v, inner_occ)
        for x in inner_occ:
            if x in vb:
                raise LayoutError(loc, f"crossed diamond hierarchy unsupported: virtual base '{x}' embedded inside virtual base '{v}' of '{cls}'")
    # dynamic virtual-base location goes through the vptr tag, so the base
    # must publish one
    for v in vb:
        if not is_polymorphic(world, v):
            raise LayoutError(
                loc, f"virtual base '{v}' of '{cls}' must be polymorphic (declare a virtual method)"
            )


# ---------------------------------------------------------------------------
# Layout construction
# ---------------------------------------------------------------------------


class _LayoutBuilder:
    def __init__(self, world: World, poly_memo: dict):
        self.world = world
        self.poly_memo = poly_memo
        self.done: dict[str, ClassLayout] = {}

    def build(self, cls: str) -> ClassLayout:
        if cls in self.done:
            return self.done[cls]
        info = self.world.classes[cls]
        check_hierarchy(self.world, cls, info.decl.loc)
        layout = ClassLayout(cls=cls)
        layout.vbases = collect_vbases(self.world, cls)
        self._embed_nv(layout, cls, 0)
        for v in layout.vbases:
            self._embed_nv(layout, v, len(layout.slots))
        layout.base_offsets[cls] = 0
        self.done[cls] = layout
        return layout

    def _embed_nv(self, layout: ClassLayout, cls: str, at: int) -> None:
        """Append cls's non-virtual part; `at` is its subobject offset."""
        world = self.world
        info = world.classes[cls]
        if cls in layout.base_offsets:
            raise LayoutError(info.decl.loc, f"subobject '{cls}' embedded twice in '{layout.cls}'")
        layout.base_offsets[cls] = at
        prim = primary_base(world, cls)
        if is_polymorphic(world, cls, self.poly_memo) and prim is None:
            layout.vptr_views[cls] = len(layout.slots)
            layout.slots.append(Slot(name=f"vptr${cls}", kind="vptr", ty=None, origin=cls))
        for b, virt in info.bases:
            if virt:
                continue
            self._embed_nv(layout, b, len(layout.slots))
        if prim is not None:
            # share the primary base's vptr for this view
            layout.vptr_views[cls] = layout.vptr_views[prim]
        for fname, fty in info.fields:
            layout.own_field_offsets[(cls, fname)] = len(layout.slots)
            if fty.kind == "class":
                # embedded complete object: splice in its full layout
                member = self.build(fty.name)
                for s in member.slots:
                    layout.slots.append(
                        Slot(name=f"{fname}.{s.name}", kind=s.kind, ty=s.ty, origin=s.origin)
                    )
            else:
                layout.slots.append(Slot(name=fname, kind="field", ty=fty, origin=cls))
        # vbase vptr views map onto the hoisted region of the most-derived
        # object; recorded when the vbase region itself is embedded


def build_layouts(program: Program) -> dict[str, ClassLayout]:
    """Compute slot layouts for every class in a monomorphized program."""
    world: World = program.world
    poly_memo: dict[str, bool] = {}
    builder = _LayoutBuilder(world, poly_memo)
    layouts = {}
    for cls in world.classes:
        layouts[cls] = builder.build(cls)
    return layouts


# ---------------------------------------------------------------------------
# VTables
# ---------------------------------------------------------------------------


def _own_virtual_decls(world: World, cls: str) -> list[tuple]:
    """(sig_key, display) for virtual entries declared by cls, vtable order."""
    out = []
    info = world.classes[cls]
    for m in info.methods:
        if m.is_virtual:
            out.append((m.sig_key, m.name))
    if has_virtual_dtor(world, cls):
        out.append((DTOR_KEY, "~" + cls))
    return out


def vtable_method_list(world: World, cls: str, _memo=None) -> list[tuple]:
    """Ordered (sig_key, display) list for the vtable published by cls's view."""
    memo = _memo if _memo is not None else {}
    if cls in memo:
        return memo[cls]
    prim = primary_base(world, cls)
    entries: list[tuple] = list(vtable_method_list(world, prim, memo)) if prim else []
    keys = {k for k, _ in entries}
    for key, display in _own_virtual_decls(world, cls):
        if key not in keys:
            entries.append((key, display))
            keys.add(key)
    memo[cls] = entries
    return entries


def _final_overrider(world: World, dyn_cls: str, sig_key) -> MethodInfo | tuple:
    if sig_key == DTOR_KEY:
        info = world.classes[dyn_cls]
        return ("dtor", dyn_cls, info.dtor.mangled)
    return world.final_overrider(dyn_cls, sig_key)


def _overrider_cls_and_target(world: World, dyn_cls: str, sig_key) -> tuple[str, str]:
    got = _final_overrider(world, dyn_cls, sig_key)
    if isinstance(got, tuple):
        return got[1], got[2]
    return got.cls, got.mangled


def build_vtables(
    layouts: dict[str, ClassLayout], program: Program
) -> tuple[dict, dict]:
    """VTable per (view, derived) pair plus the deduplicated thunk set."""
    world: World = program.world
    memo: dict = {}
    vtables: dict = {}
    thunks: dict[str, Thunk] = {}
    thunk_by_key: dict[tuple, str] = {}

    def get_thunk(target_cls: str, target: str, display: str, view: str, delta: int, sig_key) -> str:
        key = (target, view, delta)
        if key in thunk_by_key:
            return thunk_by_key[key]
        base_name = f"thunk::{target_cls}::{display}({view}*)"
        name = base_name
        if name in thunks:
            name = f"{base_name}@d{delta}"
        thunks[name] = Thunk(
            name=name, view=view, delta=delta, target=target, target_cls=target_cls, sig_key=sig_key
        )
        thunk_by_key[key] = name
        return name

    for derived, layout in layouts.items():
        for view in layout.base_offsets:
            if not is_polymorphic(world, view):
                continue
            methods = vtable_method_list(world, view, memo)
            vt = VTable(view=view, derived=derived)
            view_off = layout.base_offsets[view]
            for sig_key, display in methods:
                o_cls, target = _overrider_cls_and_target(world, derived, sig_key)
                o_off = layout.base_offsets[o_cls]
                impl_cls, impl_target = _overrider_cls_and_target(world, view, sig_key)
                disp = display if sig_key != DTOR_KEY else "~" + o_cls
                if view == derived and o_off == view_off:
                    vt.entries.append(VTableEntry(sig_key, disp, "direct", target))
                elif target == impl_target and o_off == view_off:
                    vt.entries.append(VTableEntry(sig_key, disp, "direct", impl_target))
                else:
                    tname = get_thunk(o_cls, target, disp, view, o_off - view_off, sig_key)
                    vt.entries.append(VTableEntry(sig_key, disp, "thunk", tname))
            vtables[(view, derived)] = vt
    return vtables, thunks


# ---------------------------------------------------------------------------
# vptr initialization injection
# ---------------------------------------------------------------------------


def inject_vptr_init(program: Program, layouts: dict, vtables: dict) -> Program:
    """Annotate every constructor with the vptr assignments it must perform.

    Complete-object constructors set every vptr slot of the class; base
    subobject constructors (used when a derived class constructs this base)
    only set the slots inside the non-virtual part.  Assignments happen
    after base constructor calls, so the most-derived writes win.
    """
    world: World = program.world
    for cls, info in world.classes.items():
        layout = layouts[cls]
        all_inits = []
        nv_inits = []
        vbase_offsets = {v: layout.base_offsets[v] for v in layout.vbases}
        nv_end = min(vbase_offsets.values()) if vbase_offsets else layout.size
        seen = set()
        for view, off in sorted(layout.vptr_views.items(), key=lambda kv: kv[1]):
            if off in seen:
                continue
            seen.add(off)
            slot = layout.slots[off]
            introducer = slot.origin
            vt = vtables.get((introducer, cls))
            if vt is None:
                continue
            all_inits.append((off, vt.name, introducer))
            if off < nv_end:
                nv_inits.append((off, vt.name, introducer))
        for ctor in info.ctors:
            ctor.vptr_inits = all_inits
            ctor.vptr_inits_base = nv_inits
        if info.dtor is not None:
            info.dtor.vptr_inits = all_inits
            info.dtor.vptr_inits_base = nv_inits
    return program


def build_object_model(program: Program) -> ObjectModel:
    """Full object model for a monomorphized program."""
    world: World = program.world
    layouts = build_layouts(program)
    vtables, thunks = build_vtables(layouts, program)
    inject_vptr_init(program, layouts, vtables)
    om = ObjectModel(layouts=layouts, vtables=vtables, thunks=thunks)
    for i, cls in enumerate(world.classes):
        om.tags[cls] = i + 1
    memo: dict = {}
    for cls in world.classes:
        om.method_lists[cls] = [k for k, _ in vtable_method_list(world, cls, memo)]
    return om


# ---------------------------------------------------------------------------
# Dump (--show-layouts)
# ---------------------------------------------------------------------------


def dump_layouts(program: Program, om: ObjectModel) -> str:
    world: World = program.world
    lines: list[str] = []
    for cls in world.classes:
        layout = om.layouts[cls]
        lines.append(f"class {cls} (size {layout.size}):")
        for i, s in enumerate(layout.slots):
            if s.kind == "vptr":
                lines.append(f"  slot {i}: vptr ({s.origin})")
            else:
                lines.append(f"  slot {i}: {s.name} : {mangle_type(s.ty)} (from {s.origin})")
        for (view, derived), vt in om.vtables.items():
            if derived != cls:
                continue
            lines.append(f"  vtable {vt.name}:")
            for j, e in enumerate(vt.entries):
                lines.append(f"    {vt.name}[{j}] = {e.target}")
        lines.append("")
    return "\n".join(lines)
