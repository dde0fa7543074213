int main() {
  assert(7 / 2 == 3);
  assert(0 - 7 / 2 == -3);
  assert((0 - 7) / 2 == -3);
  assert((0 - 7) % 2 == -1);
  assert(7 % (0 - 2) == 1);
  return 0;
}
