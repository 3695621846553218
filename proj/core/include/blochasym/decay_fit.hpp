#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blochasym/errors.hpp"

namespace blochasym {

// Log-log regression of a measured quantity against rho, with the one-sided
// pass rule slope <= -target * slack + 2 * stderr.  The slack absorbs
// finite-rho preasymptotics and is printed alongside the verdict.
struct DecayFit {
  std::string quantity;
  std::vector<std::pair<double, double>> pairs;  // (rho, value)
  double slope = 0.0;
  double slope_stderr = 0.0;
  double target_exponent = 0.0;  // claim: value = O(rho^{-target})
  double slack = 0.8;
  bool pass = false;
};

DecayFit fit_decay(std::string quantity,
                   const std::vector<std::pair<double, double>>& pairs,
                   double target_exponent, double slack = 0.8);

// Plain least-squares slope + stderr of y against x (helper for custom
// pass rules such as the lambda-power check).
std::pair<double, double> ols_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace blochasym
