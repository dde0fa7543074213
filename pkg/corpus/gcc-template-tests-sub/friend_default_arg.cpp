template <int N> struct Y {
  template <int M = 8>
  friend int poke(Y const &) {
    return N * 10 + M;
  }
};
Y<4> y;
int main() {
  assert(poke<>(y) == 48);
  assert(poke<9>(y) == 49);
  return 0;
}
