#include "blochasym/bloch_function.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace blochasym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> key_of(const Eigen::VectorXi& coeffs) {
  return std::vector<int>(coeffs.data(), coeffs.data() + coeffs.size());
}

}  // namespace

double tail_mass(const SpectralResult& res, int n, const LatticeVector& gamma) {
  const double b = std::abs(res.coefficient(n, gamma));
  return 1.0 - b * b;
}

ACoeffResult A_coeff(const LatticeVector& gamma_prime, const Quasimomentum& x,
                     const FourierPotential& pot, int k, double P,
                     double denominator_floor) {
  if (gamma_prime.is_zero()) throw Error("A_coeff requires gamma' != 0");
  if (k < 1) throw Error("A_coeff requires k >= 1");

  ACoeffResult result;
  result.min_denominator = kInf;

  const double d0 = P - (x.point + gamma_prime.cartesian).squaredNorm();
  if (d0 == 0.0) {
    result.valid = false;
    return result;
  }

  if (k == 1) {
    const std::complex<double> q = pot.coefficient(gamma_prime.coeffs);
    if (q != std::complex<double>(0.0, 0.0)) {
      result.value = q / d0;
      result.min_denominator = std::abs(d0);
    }
    result.valid = result.min_denominator > denominator_floor;
    return result;
  }

  // Walk (g_1 .. g_{k-1}); offset_j = gamma' - g_1 - .. - g_j.
  struct Frame {
    Eigen::VectorXi offset_coeffs;
    Eigen::VectorXd offset_cart;
    std::complex<double> numerator;
    std::complex<double> denominator;
    double prefix_min;
  };
  std::complex<double> sum{0.0, 0.0};
  bool pole = false;
  const auto& modes = pot.support();

  std::function<void(int, const Frame&)> recurse = [&](int depth, const Frame& f) {
    for (const auto& m : modes) {
      Eigen::VectorXi oc = f.offset_coeffs - m.coeffs;
      if (oc.isZero()) continue;  // the b(N, gamma) term was isolated already
      Eigen::VectorXd ocart = f.offset_cart - m.cartesian;
      const double den = P - (x.point + ocart).squaredNorm();
      if (den == 0.0) {
        pole = true;
        continue;
      }
      Frame g;
      g.offset_coeffs = std::move(oc);
      g.offset_cart = std::move(ocart);
      g.numerator = f.numerator * m.value;
      g.denominator = f.denominator * den;
      g.prefix_min = std::min(f.prefix_min, std::abs(den));
      if (depth == k - 1) {
        const std::complex<double> tail = pot.coefficient(g.offset_coeffs);
        if (tail != std::complex<double>(0.0, 0.0)) {
          sum += g.numerator * tail / g.denominator;
          result.min_denominator = std::min(result.min_denominator, g.prefix_min);
        }
      } else {
        recurse(depth + 1, g);
      }
    }
  };

  Frame root;
  root.offset_coeffs = gamma_prime.coeffs;
  root.offset_cart = gamma_prime.cartesian;
  root.numerator = {1.0, 0.0};
  root.denominator = d0;
  root.prefix_min = std::abs(d0);
  recurse(1, root);

  result.value = sum;
  result.valid = !pole && result.min_denominator > denominator_floor;
  return result;
}

BlochPrediction predict_coefficients(const Quasimomentum& x,
                                     const FourierPotential& pot, int n,
                                     const AsymptoticConstants& constants,
                                     double rho, const BlochOptions& opts) {
  if (n < 2) throw Error("predict_coefficients requires order n >= 2");

  BlochPrediction pred;
  pred.x = x;
  pred.order = n;
  pred.min_denominator = kInf;

  const ExpansionOptions eff =
      resolve_expansion_options(opts.expansion, constants, rho);

  // P(gamma+t) = |x|^2 + F_{floor(p/3)} with the order clamped for
  // combinatorial cost; the induced shift sits below the order-n remainder.
  const int cap = opts.p_order_cap > 0 ? opts.p_order_cap : 4;
  const int p_order = std::min(static_cast<int>(std::floor(constants.p / 3.0)), cap);
  const FSequence fs = F_sequence(x, pot, p_order, eff);
  pred.P_value = x.squared_norm() + fs.values[p_order];
  pred.valid = fs.valid;
  pred.min_denominator = std::min(pred.min_denominator, fs.min_denominator);

  if (pot.empty()) {
    pred.b_center = 1.0;
    return pred;
  }

  // Offsets reachable with nonzero numerator: k-fold support sums, k <= n-1.
  std::set<std::vector<int>> offsets;
  std::vector<Eigen::VectorXi> level;
  level.push_back(Eigen::VectorXi::Zero(pot.lattice().dim()));
  for (int k = 1; k <= n - 1; ++k) {
    std::set<std::vector<int>> next_keys;
    std::vector<Eigen::VectorXi> next;
    for (const auto& base : level)
      for (const auto& m : pot.support()) {
        Eigen::VectorXi c = base + m.coeffs;
        if (next_keys.insert(key_of(c)).second) next.push_back(c);
        if (!c.isZero()) offsets.insert(key_of(c));
      }
    level = std::move(next);
  }

  double normalizer = 1.0;
  std::vector<BlochOffset> rows;
  for (const auto& key : offsets) {
    Eigen::VectorXi c(static_cast<Eigen::Index>(key.size()));
    for (std::size_t i = 0; i < key.size(); ++i) c[static_cast<Eigen::Index>(i)] = key[i];
    const LatticeVector gp = pot.lattice().vector(c);
    std::complex<double> total{0.0, 0.0};
    for (int k = 1; k <= n - 1; ++k) {
      const ACoeffResult a = A_coeff(gp, x, pot, k, pred.P_value, eff.denominator_floor);
      total += a.value;
      normalizer += std::norm(a.value);
      pred.valid = pred.valid && a.valid;
      pred.min_denominator = std::min(pred.min_denominator, a.min_denominator);
    }
    rows.push_back(BlochOffset{gp, total});
  }

  pred.normalizer = normalizer;
  pred.b_center = 1.0 / std::sqrt(normalizer);
  for (auto& row : rows) row.value *= pred.b_center;
  std::sort(rows.begin(), rows.end(), [](const BlochOffset& a, const BlochOffset& b) {
    const double na = a.gamma_prime.norm(), nb = b.gamma_prime.norm();
    if (na != nb) return na < nb;
    return lex_less(a.gamma_prime.coeffs, b.gamma_prime.coeffs);
  });
  pred.offsets = std::move(rows);
  return pred;
}

}  // namespace blochasym
