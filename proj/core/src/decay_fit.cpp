#include "blochasym/decay_fit.hpp"

#include <cmath>

namespace blochasym {

std::pair<double, double> ols_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw Error("ols_slope needs >= 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw Error("ols_slope: degenerate abscissae");
  const double slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    ss_res += r * r;
  }
  const double var = ss_res / static_cast<double>(n - 2);
  return {slope, std::sqrt(std::max(var, 0.0) / sxx)};
}

DecayFit fit_decay(std::string quantity,
                   const std::vector<std::pair<double, double>>& pairs,
                   double target_exponent, double slack) {
  if (pairs.size() < 3) throw Error("fit_decay needs at least 3 (rho, value) pairs");
  std::vector<double> lx, ly;
  double prev = 0.0;
  for (const auto& [rho, value] : pairs) {
    if (rho <= prev) throw Error("fit_decay: rho values must be strictly increasing");
    prev = rho;
    if (value <= 0)
      throw NonPositiveValue("fit_decay: value " + std::to_string(value) +
                             " at rho = " + std::to_string(rho));
    lx.push_back(std::log(rho));
    ly.push_back(std::log(value));
  }
  const auto [slope, se] = ols_slope(lx, ly);

  DecayFit fit;
  fit.quantity = std::move(quantity);
  fit.pairs = pairs;
  fit.slope = slope;
  fit.slope_stderr = se;
  fit.target_exponent = target_exponent;
  fit.slack = slack;
  fit.pass = slope <= -target_exponent * slack + 2.0 * se;
  return fit;
}

}  // namespace blochasym
