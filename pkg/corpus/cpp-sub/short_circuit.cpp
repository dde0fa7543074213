int side;
int bump(int v) {
  side = side + 1;
  return v;
}
int main() {
  side = 0;
  bool a = false && bump(1) > 0;
  assert(side == 0);
  bool b = true || bump(1) > 0;
  assert(side == 0);
  bool c = true && bump(1) > 0;
  assert(side == 1);
  assert(c);
  assert(!a);
  assert(b);
  return 0;
}
