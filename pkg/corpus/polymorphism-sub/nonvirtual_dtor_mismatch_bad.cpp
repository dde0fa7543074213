class Bird {
  public:
  virtual int doit(void) { return 21; }
};
class Penguin: public Bird {
  public:
  int doit(void) override { return 42; }
};
int main() {
  Bird *p = new Penguin();
  assert(p->doit() == 42);
  delete p;
  return 0;
}
