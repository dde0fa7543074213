class A {
  public:
  int a;
  A(int v) : a(v) {}
};
class B : public A {
  public:
  int b;
  B(int v) : A(v * 2), b(v) {}
};
class C : public B {
  public:
  int c;
  C() : B(10), c(1) {}
};
int main() {
  C obj;
  assert(obj.a == 20);
  assert(obj.b == 10);
  assert(obj.c == 1);
  return 0;
}
