class Tagged {
  public:
  int v;
  int copies;
  Tagged(int x) : v(x), copies(0) {}
  Tagged(Tagged const& other) : v(other.v), copies(other.copies + 1) {}
};
int main() {
  Tagged a(7);
  Tagged b = a;
  Tagged c = b;
  assert(c.v == 7);
  assert(c.copies == 2);
  return 0;
}
