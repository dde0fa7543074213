class First {
  public:
  int pad;
  virtual int a() { return 1; }
};
class Second {
  public:
  virtual int b() { return 2; }
};
class Impl : public First, public Second {
  public:
  int a() override { return 11; }
  int b() override { return 22; }
};
int main() {
  Impl i;
  Second* sp = &i;
  assert(sp->b() == 22);
  First* fp = &i;
  assert(fp->a() == 11);
  return 0;
}
