#include <cstdio>

int main() {
  std::puts("paracalc: subcommands not wired up yet");
  return 1;
}
