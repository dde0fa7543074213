class Small {
  public:
  int a;
};
class Big : public Small {
  public:
  int b;
};
int main() {
  Small s;
  s.a = 1;
  Big* p = (Big*)&s;
  int x = p->b;
  assert(x == x);
  return 0;
}
