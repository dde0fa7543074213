template <int N> struct P {
  template <int M>
  friend int pp(P const &) {
    return N * 10 + M;
  }
};
P<1> p1;
int main() {
  int r = pp<2>(p1);
  assert(r * r == 150);
  return 0;
}
