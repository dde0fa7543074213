int order;
class Base {
  public:
  virtual ~Base() { order = order * 10 + 1; }
  virtual int id() { return 1; }
};
class Derived : public Base {
  public:
  ~Derived() { order = order * 10 + 2; }
  int id() override { return 2; }
};
int main() {
  order = 0;
  Base* p = new Derived();
  assert(p->id() == 2);
  delete p;
  assert(order == 21);
  return 0;
}
