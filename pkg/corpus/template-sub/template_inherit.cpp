template<typename T> class Store {
  public:
  T item;
  Store(T v) : item(v) {}
  T get() { return item; }
};
class IntStore : public Store<int> {
  public:
  IntStore() : Store<int>(99) {}
};
int main() {
  IntStore s;
  assert(s.get() == 99);
  return 0;
}
