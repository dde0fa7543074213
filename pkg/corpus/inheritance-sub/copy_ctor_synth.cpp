class Point {
  public:
  int x;
  int y;
  Point(int a, int b) : x(a), y(b) {}
};
int main() {
  Point p(3, 4);
  Point q = p;
  q.x = 10;
  assert(p.x == 3);
  assert(q.x == 10);
  assert(q.y == 4);
  return 0;
}
