template<int N> struct Sized {
  int data;
};
template<int N> int size_of(Sized<N>& s) {
  return N;
}
int main() {
  Sized<12> s;
  s.data = 0;
  assert(size_of(s) == 12);
  return 0;
}
