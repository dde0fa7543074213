class A {
  public:
  virtual int rank() { return 1; }
};
class B : public A {
  public:
  int rank() override { return 2; }
};
class C : public B {
  public:
  int rank() override { return 3; }
};
int main() {
  C c;
  A* pa = &c;
  B* pb = &c;
  assert(pa->rank() == 3);
  assert(pb->rank() == 3);
  B b;
  pa = &b;
  assert(pa->rank() == 2);
  return 0;
}
