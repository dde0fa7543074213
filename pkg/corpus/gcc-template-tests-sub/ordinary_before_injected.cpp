template <int M> int pick() {
  return M;
}
template <int N> struct Q {
  template <int M>
  friend int pick(Q const &) {
    return N * 1000 + M;
  }
};
Q<7> q;
int main() {
  assert(pick<3>() == 3);
  assert(pick<3>(q) == 7003);
  return 0;
}
