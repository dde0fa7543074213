class Shape {
  public:
  int sides;
};
class Square : public Shape {
  public:
  int len;
};
int main() {
  Square s;
  s.sides = 4;
  s.len = 5;
  Shape* p = &s;
  assert(p->sides == 4);
  p->sides = 6;
  assert(s.sides == 6);
  return 0;
}
