#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochasym {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 0;
  std::vector<int> only;  // empty = all criteria
  std::ostream* log = nullptr;
};

// The validation suite for the d = 2 square-lattice fixture: cosine pair
// potential at couplings {0.1, 0.5}, rho grid {20, 40, 80} unless a
// criterion states otherwise.  Every tolerance is pinned here.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

}  // namespace blochasym
