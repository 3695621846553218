#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "blochasym/acceptance.hpp"

// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
// Usage: acceptance_tests [criterion ids...]
int main(int argc, char** argv) {
  blochasym::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::atoi(argv[i]));

  const auto results = blochasym::run_acceptance(opts);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": "
              << r.name << " [" << r.seconds << "s] " << r.detail << "\n";
  }
  if (results.empty()) {
    std::cout << "no criteria selected\n";
    return 1;
  }
  std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
  return all ? 0 : 1;
}
