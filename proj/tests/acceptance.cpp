// Runs every acceptance criterion and prints one line per criterion.

#include <cstdio>

#include "bmot/acceptance.hpp"

int main() {
  using namespace bmot::acceptance;
  const Run r = run({}, [](const CriterionResult& c) { std::printf("%s\n", format_line(c).c_str()); });
  std::printf("%s\n", r.pass() ? "acceptance: all criteria pass" : "acceptance: FAILED");
  return r.pass() ? 0 : 1;
}
