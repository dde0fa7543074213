template<typename T> class Accum {
  public:
  T total;
  Accum() : total(0) {}
  void add(T v) { total = total + v; }
  T get() { return total; }
};
int main() {
  Accum<int> a;
  a.add(20);
  a.add(22);
  assert(a.get() == 42);
  return 0;
}
