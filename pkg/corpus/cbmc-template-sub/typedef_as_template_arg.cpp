typedef int Word;
template<typename T> struct Holder {
  T v;
};
int main() {
  Holder<Word> h;
  h.v = 7;
  assert(h.v == 7);
  return 0;
}
