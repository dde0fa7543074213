template<typename T = int> T identity(T x) {
  return x;
}
int main() {
  assert(identity(41) + 1 == 42);
  assert(identity(true));
  return 0;
}
