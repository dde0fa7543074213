template<typename T> class Source {
  public:
  virtual T next() { return 1; }
};
class Fives : public Source<int> {
  public:
  int next() override { return 5; }
};
int main() {
  Fives f;
  Source<int>* p = &f;
  assert(p->next() == 5);
  Source<int> base;
  p = &base;
  assert(p->next() == 1);
  return 0;
}
