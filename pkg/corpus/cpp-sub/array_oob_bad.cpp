int main() {
  int a[3];
  a[0] = 1;
  a[1] = 2;
  a[2] = 3;
  int i = 1;
  int x = a[i + 2];
  assert(x == x);
  return 0;
}
