int main() {
  int a = 6;
  int b = 7;
  assert(a * b == 42);
  assert(a + b == 13);
  assert(b - a == 1);
  assert(b % a == 1);
  return 0;
}
