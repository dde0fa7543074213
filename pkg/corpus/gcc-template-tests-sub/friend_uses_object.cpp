template <int N> struct Cell {
  int payload;
  template <int M>
  friend int probe(Cell const & c) {
    return c.payload * M + N;
  }
};
int main() {
  Cell<5> c;
  c.payload = 4;
  assert(probe<10>(c) == 45);
  return 0;
}
