template<int N> int fact() {
  return N * fact<N - 1>();
}
template<> int fact<0>() {
  return 1;
}
int main() {
  assert(fact<6>() == 720);
  return 0;
}
