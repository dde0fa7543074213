int main() {
  int x = 2147483647;
  int y = x + 1;
  assert(y < 0);
  return 0;
}
