int counter;
int table[3];
int main() {
  assert(counter == 0);
  assert(table[2] == 0);
  counter = counter + 5;
  assert(counter == 5);
  return 0;
}
