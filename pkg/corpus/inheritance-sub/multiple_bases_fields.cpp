class Left {
  public:
  int l;
};
class Right {
  public:
  int r;
};
class Both : public Left, public Right {
  public:
  int own;
};
int main() {
  Both b;
  b.l = 1;
  b.r = 2;
  b.own = 3;
  Right* rp = &b;
  assert(rp->r == 2);
  assert(b.l + b.r + b.own == 6);
  return 0;
}
