"""Differential checks on loop-heavy programs: every property compared
between the symbolic pipeline and the interpreter (loops are outside the
random generator's reach, so these are curated)."""
import pytest

from conftest import build_model
from minicpp_bmc.encode import encode
from minicpp_bmc.interp import ChecksConfig, interpret_concrete
from minicpp_bmc.solver import BuiltinSession
from minicpp_bmc.symex import UnwindConfig, symex

PROGRAMS = [
    (
        "loop_overflow",
        """
int main() {
  int s = 1;
  for (int i = 0; i < 6; i = i + 1) {
    s = s * 40000;
  }
  return 0;
}
""",
        {"overflow": True},
    ),
    (
        "loop_bounds_oob_last",
        """
int main() {
  int a[5];
  for (int i = 0; i <= 5; i = i + 1) {
    a[i] = i;
  }
  assert(a[2] == 2);
  return 0;
}
""",
        {"bounds": True},
    ),
    (
        "heap_churn_double_delete",
        """
int main() {
  int* keep = new int(0);
  for (int i = 0; i < 3; i = i + 1) {
    int* p = new int(i);
    assert(*p == i);
    delete p;
  }
  delete keep;
  delete keep;
  return 0;
}
""",
        {"memory": True},
    ),
    (
        "late_assert_violation",
        """
int main() {
  int x = 0;
  for (int i = 0; i < 8; i = i + 1) {
    assert(x < 5);
    x = x + 1;
  }
  return 0;
}
""",
        {},
    ),
    (
        "loop_scope_dangling",
        """
int main() {
  int* p;
  for (int i = 0; i < 3; i = i + 1) {
    int local = i;
    p = &local;
    assert(*p == i);
  }
  int v = *p;
  assert(v == v);
  return 0;
}
""",
        {"memory": True},
    ),
    (
        "dispatch_in_loop",
        """
class Shape { public: virtual int sides() { return 0; } };
class Tri : public Shape { public: int sides() override { return 3; } };
class Quad : public Shape { public: int sides() override { return 4; } };
int main() {
  Shape* shapes[3];
  Shape s;
  Tri t;
  Quad q;
  shapes[0] = &s;
  shapes[1] = &t;
  shapes[2] = &q;
  int total = 0;
  for (int i = 0; i < 3; i = i + 1) {
    total = total + shapes[i]->sides();
  }
  assert(total == 7);
  return 0;
}
""",
        {"memory": True},
    ),
    (
        "new_and_delete_in_loop",
        """
int main() {
  int sum = 0;
  for (int i = 0; i < 5; i = i + 1) {
    int* p = new int(i * i);
    sum = sum + *p;
    delete p;
  }
  assert(sum == 30);
  return 0;
}
""",
        {"memory": True},
    ),
    (
        "guarded_stores_in_loop",
        """
int main() {
  int a[4];
  for (int i = 0; i < 4; i = i + 1) {
    if (i % 2 == 0) {
      a[i] = 10 + i;
    } else {
      a[i] = 0 - i;
    }
  }
  assert(a[0] == 10);
  assert(a[1] == -1);
  assert(a[2] == 12);
  assert(a[3] == -3);
  return 0;
}
""",
        {"bounds": True},
    ),
    (
        "early_return_in_loop",
        """
int find(int* a, int n, int want) {
  for (int i = 0; i < n; i = i + 1) {
    if (a[i] == want) {
      return i;
    }
  }
  return -1;
}
int main() {
  int a[4];
  a[0] = 5; a[1] = 9; a[2] = 2; a[3] = 9;
  assert(find(&a[0], 4, 9) == 1);
  assert(find(&a[0], 4, 7) == -1);
  return 0;
}
""",
        {},
    ),
]


@pytest.mark.parametrize("name,src,checks", PROGRAMS, ids=[p[0] for p in PROGRAMS])
def test_loop_program_per_property(name, src, checks):
    model = build_model(src)
    interp = interpret_concrete(model, [], checks=ChecksConfig(**checks), stop_at_first=False)
    ssa = symex(model, UnwindConfig(k=10, **checks))
    formula = encode(ssa)
    expected = {}
    for c in interp.checks:
        expected.setdefault(c.key, []).append(not c.ok)
    session = BuiltinSession(formula)
    seen = {}
    for i, prop in enumerate(ssa.properties):
        res = session.solve([i], timeout=120)
        assert res.status in ("sat", "unsat")
        occ = seen.get(prop.key, 0)
        seen[prop.key] = occ + 1
        exp_list = expected.get(prop.key, [])
        exp = exp_list[occ] if occ < len(exp_list) else False
        assert (res.status == "sat") == exp, (name, prop.key, occ)
