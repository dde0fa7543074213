class Bird {
  public:
  virtual int doit() { return 21; }
};
class Penguin : public Bird {
  public:
  int doit() override { return 42; }
};
int main() {
  int c = nondet_int();
  Bird* p;
  int want;
  if (c > 0) {
    p = new Penguin();
    want = 42;
  } else {
    p = new Bird();
    want = 21;
  }
  assert(p->doit() == want);
  return 0;
}
