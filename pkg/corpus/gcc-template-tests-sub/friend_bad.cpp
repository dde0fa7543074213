template <int N> struct Z {
  template <int M>
  friend int zap(Z const &) {
    return N - M;
  }
};
Z<50> z;
int main() {
  assert(zap<8>(z) == 43);
  return 0;
}
