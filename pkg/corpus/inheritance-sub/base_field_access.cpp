class Animal {
  public:
  int legs;
};
class Dog : public Animal {
  public:
  int tricks;
};
int main() {
  Dog d;
  d.legs = 4;
  d.tricks = 2;
  assert(d.legs + d.tricks == 6);
  return 0;
}
