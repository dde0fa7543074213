template<typename A, typename B> struct Pair {
  A first;
  B second;
};
int main() {
  Pair<int, bool> p;
  p.first = 41;
  p.second = true;
  if (p.second) {
    p.first = p.first + 1;
  }
  assert(p.first == 42);
  return 0;
}
