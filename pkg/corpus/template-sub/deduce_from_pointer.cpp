template<typename T> T grab(T* p) {
  return *p;
}
int main() {
  int x = 13;
  assert(grab(&x) == 13);
  return 0;
}
