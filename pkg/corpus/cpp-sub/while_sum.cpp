int main() {
  int s = 0;
  int i = 1;
  while (i <= 5) {
    s = s + i;
    i = i + 1;
  }
  assert(s == 15);
  return 0;
}
