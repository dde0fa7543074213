void swap(int* a, int* b) {
  int t = *a;
  *a = *b;
  *b = t;
}
int main() {
  int x = 1;
  int y = 2;
  swap(&x, &y);
  assert(x == 2);
  assert(y == 1);
  return 0;
}
