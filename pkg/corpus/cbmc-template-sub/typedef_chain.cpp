typedef int Word;
typedef Word Cell;
template<typename T> T twice(T x) { return x + x; }
int main() {
  Cell c = 21;
  assert(twice(c) == 42);
  return 0;
}
