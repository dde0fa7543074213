class Base {
  public:
  int v;
  Base(int x) : v(x + 1) {}
};
class Derived : public Base {
  public:
  Derived() : Base(41) {}
};
int main() {
  Derived d;
  assert(d.v == 41);
  return 0;
}
