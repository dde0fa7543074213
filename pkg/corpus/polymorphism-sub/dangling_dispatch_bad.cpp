class Base {
  public:
  virtual ~Base() {}
  virtual int f() { return 1; }
};
class Derived : public Base {
  public:
  int f() override { return 2; }
};
int main() {
  Base* p = new Derived();
  delete p;
  int x = p->f();
  assert(x == x);
  return 0;
}
