class Speaker {
  public:
  virtual int speak() { return 1; }
};
class Walker {
  public:
  virtual int walk() { return 10; }
};
class Robot : public Speaker, public Walker {
  public:
  int speak() override { return 2; }
  int walk() override { return 20; }
};
int main() {
  Robot r;
  Speaker* s = &r;
  Walker* w = &r;
  assert(s->speak() == 2);
  assert(w->walk() == 20);
  return 0;
}
