template<typename T> struct Box {
  T v;
  int tag() { return 1; }
};
template<> struct Box<bool> {
  bool v;
  int tag() { return 2; }
};
int main() {
  Box<int> a;
  Box<bool> b;
  assert(a.tag() == 1);
  assert(b.tag() == 2);
  return 0;
}
