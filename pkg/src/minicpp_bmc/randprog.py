"""Seeded random generator for loop-free deterministic MiniC++ programs.

The programs exercise integer/boolean arithmetic, branching, small arrays,
and helper function calls; every variable is initialized at declaration
and there is no nondeterminism, so a single concrete execution defines the
truth of every safety property.  Used by the differential oracle tests.
"""
from __future__ import annotations

import random

NAMES = "abcdefghijkmnpqrstuvw"


class ProgramGen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def gen(self) -> str:
        self.int_vars: list[str] = []
        self.bool_vars: list[str] = []
        self.arrays: list[tuple[str, int]] = []
        self.counter = 0
        self.lines: list[str] = []
        helpers = self.gen_helpers()
        body: list[str] = []
        n_stmts = self.rng.randint(6, 16)
        for _ in range(n_stmts):
            self.gen_stmt(body, depth=0)
        main = ["int main() {"] + body + ["  return 0;", "}"]
        return "\n".join(helpers + main) + "\n"

    # -- helpers ---------------------------------------------------------------

    def fresh(self, prefix: str = "") -> str:
        self.counter += 1
        base = NAMES[self.counter % len(NAMES)]
        return f"{prefix}{base}{self.counter}"

    def gen_helpers(self) -> list[str]:
        self.helpers: list[tuple[str, int]] = []
        out: list[str] = []
        for _ in range(self.rng.randint(0, 2)):
            name = self.fresh("fn_")
            nargs = self.rng.randint(1, 2)
            args = [f"int p{i}" for i in range(nargs)]
            expr = self.expr_over([f"p{i}" for i in range(nargs)], [], depth=2)
            out.append(f"int {name}({', '.join(args)}) {{")
            out.append(f"  return {expr};")
            out.append("}")
            self.helpers.append((name, nargs))
        return out

    def expr_over(self, ints: list[str], bools: list[str], depth: int) -> str:
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            choices = []
            if ints:
                choices.append(lambda: r.choice(ints))
            choices.append(lambda: str(r.choice([0, 1, 2, 3, 5, 7, 10, 100, 12345, -4, -1])))
            if r.random() < 0.05:
                choices.append(lambda: str(r.choice([2147483647, -2147483647])))
            return r.choice(choices)()
        op = r.choice(["+", "-", "*", "/", "%", "+", "-"])
        a = self.expr_over(ints, bools, depth - 1)
        b = self.expr_over(ints, bools, depth - 1)
        return f"({a} {op} {b})"

    def cond_over(self, ints: list[str], bools: list[str], depth: int = 1) -> str:
        r = self.rng
        if bools and r.random() < 0.25:
            b = r.choice(bools)
            return b if r.random() < 0.7 else f"!{b}"
        op = r.choice(["==", "!=", "<", "<=", ">", ">="])
        a = self.expr_over(ints, bools, depth)
        c = self.expr_over(ints, bools, depth)
        s = f"{a} {op} {c}"
        if r.random() < 0.2:
            op2 = r.choice(["&&", "||"])
            d = self.cond_over(ints, bools, 0)
            s = f"({s}) {op2} ({d})"
        return s

    # -- statements ----------------------------------------------------------------

    def gen_stmt(self, out: list[str], depth: int, indent: str = "  ") -> None:
        r = self.rng
        kind = r.random()
        if kind < 0.35 or not self.int_vars:
            v = self.fresh()
            out.append(f"{indent}int {v} = {self.expr_over(self.int_vars, self.bool_vars, 2)};")
            self.int_vars.append(v)
        elif kind < 0.45:
            v = self.fresh("b")
            out.append(f"{indent}bool {v} = {self.cond_over(self.int_vars, self.bool_vars)};")
            self.bool_vars.append(v)
        elif kind < 0.55 and depth < 2:
            cond = self.cond_over(self.int_vars, self.bool_vars)
            out.append(f"{indent}if ({cond}) {{")
            saved = (list(self.int_vars), list(self.bool_vars))
            for _ in range(r.randint(1, 3)):
                self.gen_stmt(out, depth + 1, indent + "  ")
            self.int_vars, self.bool_vars = list(saved[0]), list(saved[1])
            if r.random() < 0.6:
                out.append(f"{indent}}} else {{")
                for _ in range(r.randint(1, 2)):
                    self.gen_stmt(out, depth + 1, indent + "  ")
                self.int_vars, self.bool_vars = list(saved[0]), list(saved[1])
            out.append(f"{indent}}}")
        elif kind < 0.63 and depth == 0:
            name = self.fresh("arr_")
            n = r.randint(2, 5)
            out.append(f"{indent}int {name}[{n}];")
            for i in range(n):
                if r.random() < 0.8:
                    out.append(f"{indent}{name}[{i}] = {self.expr_over(self.int_vars, [], 1)};")
            self.arrays.append((name, n))
        elif kind < 0.72 and self.arrays:
            name, n = r.choice(self.arrays)
            v = self.fresh()
            if self.int_vars and r.random() < 0.5:
                idx_var = r.choice(self.int_vars)
                idx = f"(({idx_var} % {n}) + {n}) % {n}"
            else:
                idx = str(r.randint(0, n - 1) if r.random() < 0.9 else n + r.randint(0, 2))
            out.append(f"{indent}int {v} = {name}[{idx}];")
            self.int_vars.append(v)
        elif kind < 0.8 and self.helpers:
            fn, nargs = r.choice(self.helpers)
            v = self.fresh()
            args = ", ".join(self.expr_over(self.int_vars, [], 1) for _ in range(nargs))
            out.append(f"{indent}int {v} = {fn}({args});")
            self.int_vars.append(v)
        elif kind < 0.9 and self.int_vars:
            v = r.choice(self.int_vars)
            out.append(f"{indent}{v} = {self.expr_over(self.int_vars, self.bool_vars, 2)};")
        else:
            out.append(f"{indent}assert({self.cond_over(self.int_vars, self.bool_vars)});")


def generate_program(seed: int) -> str:
    """One deterministic loop-free MiniC++ program for the given seed."""
    return ProgramGen(seed).gen()


class ClassProgramGen:
    """Random polymorphic hierarchies with dispatch through mixed views."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed ^ 0x5EED)

    def gen(self) -> str:
        r = self.rng
        shape = r.choice(["chain", "chain", "multi", "diamond"])
        out: list[str] = []
        self.classes: list[str] = []
        if shape == "chain":
            depth = r.randint(2, 4)
            prev = None
            for i in range(depth):
                name = f"C{i}"
                self._emit_class(out, name, [prev] if prev else [], virtual_bases=[])
                prev = name
        elif shape == "multi":
            self._emit_class(out, "A", [], [])
            self._emit_class(out, "B", [], [])
            self._emit_class(out, "M", ["A", "B"], [])
        else:
            self._emit_class(out, "T", [], [], force_methods=True)
            self._emit_class(out, "L", [], ["T"])
            self._emit_class(out, "R", [], ["T"])
            # the join of a diamond must override everything both arms
            # touched, or there is no unique final overrider
            self._emit_class(out, "D", ["L", "R"], [], override_all=True)
        out.append("int main() {")
        body: list[str] = []
        ptrs: list[tuple[str, str]] = []  # (var, static class)
        for i in range(r.randint(2, 4)):
            impl = r.choice(self.classes)
            views = [impl] + self.bases_of[impl]
            view = r.choice(views)
            var = f"p{i}"
            if r.random() < 0.5:
                body.append(f"  {view}* {var} = new {impl}();")
            else:
                body.append(f"  {impl} o{i};")
                body.append(f"  {view}* {var} = &o{i};")
            ptrs.append((var, view))
        for _ in range(r.randint(2, 5)):
            var, view = r.choice(ptrs)
            m = r.choice(self.methods_of[view])
            if r.random() < 0.5:
                body.append(f"  assert({var}->{m}() == {var}->{m}());")
            else:
                v = f"v{len(body)}"
                body.append(f"  int {v} = {var}->{m}();")
                body.append(f"  assert({v} == {r.randint(-3, 60)});")
        out.extend(body)
        out.append("  return 0;")
        out.append("}")
        return "\n".join(out) + "\n"

    def _emit_class(self, out, name, bases, virtual_bases, force_methods=False, override_all=False):
        r = self.rng
        self.classes.append(name)
        if not hasattr(self, "bases_of"):
            self.bases_of: dict[str, list[str]] = {}
            self.methods_of: dict[str, list[str]] = {}
            self.fields_of: dict[str, list[str]] = {}
        all_bases = []
        for b in bases + virtual_bases:
            all_bases.extend([b] + self.bases_of[b])
        self.bases_of[name] = list(dict.fromkeys(all_bases))
        inherited = []
        for b in bases + virtual_bases:
            inherited.extend(self.methods_of[b])
        inherited = list(dict.fromkeys(inherited))
        own_new = []
        if force_methods or not inherited or r.random() < 0.6:
            own_new.append(f"m{name.lower()}")
        if override_all:
            overrides = list(inherited)
        else:
            overrides = [m for m in inherited if r.random() < 0.7]
        self.methods_of[name] = list(dict.fromkeys(inherited + own_new))
        field = f"f{name.lower()}"
        self.fields_of[name] = [field]
        head = f"class {name}"
        parts = [f"virtual public {b}" for b in virtual_bases] + [f"public {b}" for b in bases]
        if parts:
            head += " : " + ", ".join(parts)
        out.append(head + " {")
        out.append("  public:")
        out.append(f"  int {field};")
        out.append(f"  {name}() : {field}({r.randint(0, 9)}) {{}}")
        for m in own_new:
            out.append(f"  virtual int {m}() {{ return {r.randint(0, 20)} + {field}; }}")
        for m in overrides:
            out.append(f"  int {m}() override {{ return {r.randint(20, 60)} + {field}; }}")
        out.append("};")


def generate_class_program(seed: int) -> str:
    """One deterministic polymorphic MiniC++ program for the given seed."""
    return ClassProgramGen(seed).gen()
