int seen;
class Base {
  public:
  virtual int tag() { return 1; }
  Base() { seen = tag(); }
};
class Derived : public Base {
  public:
  int tag() override { return 2; }
};
int main() {
  seen = 0;
  Derived d;
  assert(seen == 1);
  assert(d.tag() == 2);
  return 0;
}
