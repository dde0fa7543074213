template<int N> int countdown() {
  return countdown<N - 1>() + 1;
}
template<> int countdown<0>() {
  return 0;
}
int main() {
  assert(countdown<10>() == 10);
  return 0;
}
