template<typename T> struct Traits {
  int kind() { return 10; }
};
template<> struct Traits<bool> {
  int kind() { return 20; }
};
typedef Traits<bool> BoolTraits;
typedef BoolTraits Alias;
int main() {
  Alias t;
  assert(t.kind() == 20);
  Traits<int> u;
  assert(u.kind() == 10);
  return 0;
}
