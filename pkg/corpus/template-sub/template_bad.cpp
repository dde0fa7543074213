template<typename T> T triple(T x) {
  return x * 3;
}
int main() {
  assert(triple(7) == 22);
  return 0;
}
