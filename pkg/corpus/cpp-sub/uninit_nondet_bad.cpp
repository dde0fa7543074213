int main() {
  int x;
  assert(x != 42);
  return 0;
}
