class Counter {
  public:
  int n;
  Counter() : n(0) {}
  int bump(int by) {
    n = n + by;
    return n;
  }
};
class Fancy : public Counter {
  public:
  int unused;
};
int main() {
  Fancy f;
  f.bump(3);
  f.bump(4);
  assert(f.n == 7);
  return 0;
}
