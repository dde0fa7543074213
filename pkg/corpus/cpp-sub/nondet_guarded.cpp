int main() {
  int x = nondet_int();
  if (x > 0) {
    if (x < 1000) {
      int y = x * 2;
      assert(y > x);
    }
  }
  return 0;
}
