template<int N> int square() {
  return N * N;
}
int main() {
  assert(square<3>() == 10);
  return 0;
}
