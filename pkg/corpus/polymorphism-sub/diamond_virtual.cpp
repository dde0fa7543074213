class Top {
  public:
  int t;
  virtual int id() { return 1; }
};
class Left : virtual public Top {
  public:
  int l;
};
class Right : virtual public Top {
  public:
  int r;
};
class Bottom : public Left, public Right {
  public:
  int id() override { return 9; }
};
int main() {
  Bottom b;
  b.t = 5;
  Top* tp = &b;
  Left* lp = &b;
  Right* rp = &b;
  assert(tp->id() == 9);
  assert(lp->id() == 9);
  assert(rp->id() == 9);
  assert(lp->t == 5);
  return 0;
}
