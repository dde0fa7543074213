class Box {
  public:
  int v;
  Box(int x) : v(x) {}
};
void fill(Box& b, int v) {
  b.v = v;
}
int main() {
  Box b(0);
  fill(b, 9);
  assert(b.v == 9);
  return 0;
}
