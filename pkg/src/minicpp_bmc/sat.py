"""CDCL SAT solver: watched literals, 1UIP learning, VSIDS, Luby restarts.

Correctness-first backend for the built-in solving path; external SMT
solvers are the performance path.  Literals are nonzero ints (DIMACS
convention), variables are 1..nvars.
"""
from __future__ import annotations

import time
from heapq import heappush, heappop


class SatTimeout(Exception):
    pass


class CnfBuilder:
    """CNF construction with constant-folding, structurally hashed gates."""

    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self._true_var: int | None = None
        self._gate_memo: dict[tuple, int] = {}

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add(self, clause: list[int]) -> None:
        self.clauses.append(clause)

    def const_true(self) -> int:
        if self._true_var is None:
            self._true_var = self.new_var()
            self.add([self._true_var])
        return self._true_var

    def _is_true(self, l: int) -> bool:
        return self._true_var is not None and l == self._true_var

    def _is_false(self, l: int) -> bool:
        return self._true_var is not None and l == -self._true_var

    # Tseitin gates ---------------------------------------------------------

    def gate_and(self, lits: list[int]) -> int:
        out = []
        seen = set()
        for l in lits:
            if self._is_false(l):
                return -self.const_true()
            if self._is_true(l) or l in seen:
                continue
            if -l in seen:
                return -self.const_true()
            seen.add(l)
            out.append(l)
        if not out:
            return self.const_true()
        if len(out) == 1:
            return out[0]
        key = ("and", tuple(sorted(out)))
        got = self._gate_memo.get(key)
        if got is not None:
            return got
        o = self.new_var()
        for l in out:
            self.add([-o, l])
        self.add([o] + [-l for l in out])
        self._gate_memo[key] = o
        return o

    def gate_or(self, lits: list[int]) -> int:
        return -self.gate_and([-l for l in lits])

    def gate_xor(self, a: int, b: int) -> int:
        if self._is_false(a):
            return b
        if self._is_false(b):
            return a
        if self._is_true(a):
            return -b
        if self._is_true(b):
            return -a
        if a == b:
            return -self.const_true()
        if a == -b:
            return self.const_true()
        key = ("xor", (a, b) if a < b else (b, a))
        got = self._gate_memo.get(key)
        if got is not None:
            return got
        o = self.new_var()
        self.add([-o, a, b])
        self.add([-o, -a, -b])
        self.add([o, -a, b])
        self.add([o, a, -b])
        self._gate_memo[key] = o
        return o

    def gate_iff(self, a: int, b: int) -> int:
        return -self.gate_xor(a, b)

    def gate_ite(self, c: int, a: int, b: int) -> int:
        if self._is_true(c):
            return a
        if self._is_false(c):
            return b
        if a == b:
            return a
        if self._is_true(a) or a == c:
            return self.gate_or([c, b])
        if self._is_false(a) or a == -c:
            return self.gate_and([-c, b])
        if self._is_true(b) or b == -c:
            return self.gate_or([-c, a])
        if self._is_false(b) or b == c:
            return self.gate_and([c, a])
        if a == -b:
            return self.gate_iff(c, a)
        key = ("ite", c, a, b)
        got = self._gate_memo.get(key)
        if got is not None:
            return got
        o = self.new_var()
        self.add([-c, -a, o])
        self.add([-c, a, -o])
        self.add([c, -b, o])
        self.add([c, b, -o])
        self._gate_memo[key] = o
        return o

    def gate_full_adder(self, a: int, b: int, cin: int) -> tuple[int, int]:
        s = self.gate_xor(self.gate_xor(a, b), cin)
        cout = self.gate_or(
            [self.gate_and([a, b]), self.gate_and([a, cin]), self.gate_and([b, cin])]
        )
        return s, cout


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    if (1 << k) - 1 == i:
        return 1 << (k - 1)
    return _luby(i - (1 << (k - 1)) + 1)


class CdclSolver:
    def __init__(self, nvars: int, clauses: list[list[int]], deadline: float | None = None):
        self.nvars = nvars
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [0] * (nvars + 1)  # 0 unassigned, +1 true, -1 false
        self.level: list[int] = [0] * (nvars + 1)
        self.reason: list[int | None] = [None] * (nvars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.activity: list[float] = [0.0] * (nvars + 1)
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.phase: list[int] = [-1] * (nvars + 1)
        self.deadline = deadline
        self.propagations = 0
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(1, nvars + 1)]
        self.ok = True
        for c in clauses:
            if not self.add_clause(list(c)):
                self.ok = False
                return

    # -- clause management ---------------------------------------------------

    def add_clause(self, lits: list[int]) -> bool:
        lits = sorted(set(lits), key=abs)
        present = set(lits)
        if any(-l in present for l in lits):
            return True
        # simplify against the root-level assignment
        out = []
        for l in lits:
            v = self.value(l)
            if v == 1:
                return True
            if v == -1:
                continue
            out.append(l)
        if not out:
            return False
        if len(out) == 1:
            return self.enqueue(out[0], None)
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watch(out[0], idx)
        self.watch(out[1], idx)
        return True

    def watch(self, lit: int, idx: int) -> None:
        self.watches.setdefault(-lit, []).append(idx)

    def value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def enqueue(self, lit: int, reason: int | None) -> bool:
        v = self.value(lit)
        if v == 1:
            return True
        if v == -1:
            return False
        self.assign[abs(lit)] = 1 if lit > 0 else -1
        self.level[abs(lit)] = len(self.trail_lim)
        self.reason[abs(lit)] = reason
        self.trail.append(lit)
        return True

    # -- search ----------------------------------------------------------------

    def propagate(self) -> int | None:
        """Returns a conflicting clause index or None."""
        qhead = getattr(self, "_qhead", 0)
        while qhead < len(self.trail):
            lit = self.trail[qhead]
            qhead += 1
            self.propagations += 1
            if self.propagations % 8192 == 0 and self.deadline is not None:
                if time.monotonic() > self.deadline:
                    raise SatTimeout()
            watchers = self.watches.get(lit, [])
            i = 0
            while i < len(watchers):
                ci = watchers[i]
                clause = self.clauses[ci]
                # ensure the false literal is at position 1
                if clause[0] == -lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) == 1:
                    i += 1
                    continue
                moved = False
                for j in range(2, len(clause)):
                    if self.value(clause[j]) != -1:
                        clause[1], clause[j] = clause[j], clause[1]
                        self.watch(clause[1], ci)
                        watchers[i] = watchers[-1]
                        watchers.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self.value(clause[0]) == -1:
                    self._qhead = qhead
                    return ci
                self.enqueue(clause[0], ci)
                i += 1
        self._qhead = qhead
        return None

    def bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        heappush(self.heap, (-self.activity[var], var))
        if self.activity[var] > 1e100:
            for v in range(1, self.nvars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def analyze(self, conflict: int) -> tuple[list[int], int]:
        learnt = []
        seen = [False] * (self.nvars + 1)
        counter = 0
        lit = None
        clause = self.clauses[conflict]
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            for q in clause:
                if lit is not None and q == -lit:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self.bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            lit = -self.trail[idx]
            v = abs(lit)
            seen[v] = False
            counter -= 1
            idx -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[v]]
        learnt.insert(0, lit)
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[1:])
        # keep a literal of the backtrack level in the second watch position
        for i in range(1, len(learnt)):
            if self.level[abs(learnt[i])] == back:
                learnt[1], learnt[i] = learnt[i], learnt[1]
                break
        return learnt, back

    def backtrack(self, level: int) -> None:
        while len(self.trail_lim) > level:
            start = self.trail_lim.pop()
            for lit in self.trail[start:]:
                v = abs(lit)
                self.phase[v] = 1 if lit > 0 else -1
                self.assign[v] = 0
                self.reason[v] = None
                heappush(self.heap, (-self.activity[v], v))
            del self.trail[start:]
        self._qhead = min(getattr(self, "_qhead", 0), len(self.trail))

    def decide(self) -> int | None:
        while self.heap:
            act, v = heappop(self.heap)
            if self.assign[v] == 0 and -act == self.activity[v]:
                return v if self.phase[v] > 0 else -v
        for v in range(1, self.nvars + 1):
            if self.assign[v] == 0:
                return v if self.phase[v] > 0 else -v
        return None

    def solve(self, assumptions: list[int] | None = None) -> str:
        """Decide satisfiability, optionally under assumption literals.

        Learned clauses persist across calls: assumptions enter as plain
        decisions, so every learned clause is globally valid.
        """
        if not self.ok:
            return "unsat"
        assumptions = assumptions or []
        self.backtrack(0)
        n_assumed = 0  # decision levels currently holding assumptions
        conflicts = 0
        restart_idx = 1
        restart_budget = 32 * _luby(restart_idx)
        while True:
            conflict = self.propagate()
            if conflict is not None:
                conflicts += 1
                if len(self.trail_lim) == 0:
                    self.ok = False
                    return "unsat"
                if len(self.trail_lim) <= n_assumed:
                    # only assumption decisions on the trail
                    return "unsat"
                learnt, back = self.analyze(conflict)
                self.backtrack(back)
                n_assumed = min(n_assumed, back)
                if len(learnt) == 1:
                    self.backtrack(0)
                    n_assumed = 0
                    if not self.enqueue(learnt[0], None):
                        self.ok = False
                        return "unsat"
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watch(learnt[0], idx)
                    self.watch(learnt[1], idx)
                    self.enqueue(learnt[0], idx)
                self.var_inc /= self.var_decay
                if conflicts >= restart_budget:
                    conflicts = 0
                    restart_idx += 1
                    restart_budget = 32 * _luby(restart_idx)
                    self.backtrack(0)
                    n_assumed = 0
                continue
            if len(self.trail_lim) < len(assumptions):
                a = assumptions[len(self.trail_lim)]
                v = self.value(a)
                if v == -1:
                    return "unsat"
                self.trail_lim.append(len(self.trail))
                n_assumed = len(self.trail_lim)
                if v == 0:
                    self.enqueue(a, None)
                continue
            lit = self.decide()
            if lit is None:
                return "sat"
            self.trail_lim.append(len(self.trail))
            self.enqueue(lit, None)

    def model(self) -> dict[int, bool]:
        return {v: self.assign[v] > 0 for v in range(1, self.nvars + 1)}
