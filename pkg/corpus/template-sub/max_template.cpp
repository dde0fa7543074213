template<typename T> T biggest(T a, T b) {
  if (a < b) {
    return b;
  }
  return a;
}
int main() {
  assert(biggest(3, 9) == 9);
  assert(biggest<int>(5, 2) == 5);
  return 0;
}
