template<int N, int M = N * 2> int combo() {
  return N * 100 + M;
}
int main() {
  assert(combo<3>() == 306);
  assert(combo<3, 9>() == 309);
  return 0;
}
