class Adder {
  public:
  virtual int apply(int x) { return x + 1; }
};
class Doubler : public Adder {
  public:
  int apply(int x) override { return x * 2; }
};
int run(Adder* a, int seed) {
  return a->apply(seed);
}
int main() {
  Adder base;
  Doubler twice;
  assert(run(&base, 10) == 11);
  assert(run(&twice, 10) == 20);
  return 0;
}
