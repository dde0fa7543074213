template<typename T> struct Mode {
  int which() { return 1; }
};
template<> struct Mode<int> {
  int which() { return 2; }
};
int main() {
  Mode<int> m;
  assert(m.which() == 1);
  return 0;
}
