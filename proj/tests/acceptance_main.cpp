#include <iostream>

#include "ek/selftest.hpp"

int main() {
  auto results = ek::run_acceptance(&std::cout);
  int bad = 0;
  for (const auto& r : results)
    if (!r.pass) ++bad;
  if (bad != 0) {
    std::cout << bad << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
