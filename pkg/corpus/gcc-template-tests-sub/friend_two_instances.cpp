template <int N> struct X {
  template <int M>
  friend int foo(X const &) {
    return N * 100 + M;
  }
};
X<1> one;
X<2> two;
int main() {
  assert(foo<5>(one) == 105);
  assert(foo<7>(two) == 207);
  return 0;
}
