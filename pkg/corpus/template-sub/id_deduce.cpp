template<typename T = int> T id(T x) { return x; }
int main() {
  int y = id(3);
  assert(y == 3);
  bool b = id(true);
  assert(b);
  return 0;
}
