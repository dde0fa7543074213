template <int N> struct Gen {
  template <int A, int B>
  friend int mix(Gen const &) {
    return N + A * 10 + B * 100;
  }
};
Gen<3> g;
int main() {
  assert(mix<2, 1>(g) == 123);
  return 0;
}
