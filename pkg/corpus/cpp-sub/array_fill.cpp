int main() {
  int a[4];
  for (int i = 0; i < 4; i = i + 1) {
    a[i] = i * i;
  }
  assert(a[0] + a[1] + a[2] + a[3] == 14);
  return 0;
}
