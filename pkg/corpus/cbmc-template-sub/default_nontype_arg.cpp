template<int N = 5> int scaled(int x) {
  return x * N;
}
int main() {
  assert(scaled<>(3) == 15);
  assert(scaled<2>(3) == 6);
  return 0;
}
