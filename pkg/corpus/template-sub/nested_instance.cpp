template<typename T> struct Wrap {
  T inner;
};
int main() {
  Wrap<Wrap<int> > w;
  w.inner.inner = 7;
  assert(w.inner.inner == 7);
  return 0;
}
