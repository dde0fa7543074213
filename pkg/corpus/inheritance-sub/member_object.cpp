class Engine {
  public:
  int power;
  Engine() : power(100) {}
};
class Car {
  public:
  Engine e;
  int wheels;
  Car(int w) : wheels(w) {}
  int total() { return e.power + wheels; }
};
int main() {
  Car c(4);
  assert(c.total() == 104);
  return 0;
}
