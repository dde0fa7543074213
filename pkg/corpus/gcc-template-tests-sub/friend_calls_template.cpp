template <typename T> T dbl(T x) {
  return x + x;
}
template <int N> struct W {
  template <int M>
  friend int wob(W const &) {
    return dbl(N) + M;
  }
};
W<20> w;
int main() {
  assert(wob<2>(w) == 42);
  return 0;
}
