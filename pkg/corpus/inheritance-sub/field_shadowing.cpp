class Base {
  public:
  int v;
};
class Derived : public Base {
  public:
  int v;
};
int main() {
  Derived d;
  d.v = 10;
  Base* b = &d;
  b->v = 20;
  assert(d.v == 10);
  assert(b->v == 20);
  return 0;
}
