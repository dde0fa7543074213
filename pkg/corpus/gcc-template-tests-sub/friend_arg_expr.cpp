template <int N> struct K {
  template <int M>
  friend int knock(K const &) {
    return N * M;
  }
};
K<6> k;
int main() {
  assert(knock<2 + 5>(k) == 42);
  return 0;
}
