template<typename T> struct Box {
  T v;
};
template<typename T> T unbox(Box<T>& b) {
  return b.v;
}
int main() {
  Box<int> b;
  b.v = 17;
  assert(unbox(b) == 17);
  return 0;
}
