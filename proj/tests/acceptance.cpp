#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "pspectra/acceptance.hpp"

// One line per criterion; exit status 1 when any criterion fails.
int main(int argc, char** argv) {
  pspectra::AcceptanceOptions options;
  options.progress = &std::cerr;
  for (int i = 1; i < argc; ++i) options.only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& r : pspectra::run_acceptance(options)) {
    std::cout << pspectra::format_line(r) << std::endl;
    failed += r.passed ? 0 : 1;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
