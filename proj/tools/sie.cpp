#include <cstdio>

int main() {
  std::fprintf(stderr, "sie: not implemented yet\n");
  return 2;
}
