class Bird {
  public:
  virtual int doit() { return 21; }
};
class Penguin : public Bird {
  public:
  int doit() override { return 42; }
};
int main() {
  Bird* p = new Bird();
  assert(p->doit() == 21);
  p = new Penguin();
  assert(p->doit() == 42);
  return 0;
}
