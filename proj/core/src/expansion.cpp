#include "blochasym/expansion.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace blochasym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TupleSum {
  const std::vector<PotentialMode>* modes = nullptr;
  const FourierPotential* pot = nullptr;
  const Eigen::VectorXd* x = nullptr;
  double a = 0.0;
  int k = 0;
  std::complex<double> sum{0.0, 0.0};
  double min_denominator = kInf;
  bool pole = false;

  void recurse(int depth, const Eigen::VectorXi& partial_coeffs,
               const Eigen::VectorXd& partial_cart, std::complex<double> numerator,
               std::complex<double> denominator_product, double prefix_min) {
    for (const auto& m : *modes) {
      Eigen::VectorXi c = partial_coeffs + m.coeffs;
      if (c.isZero()) continue;  // partial sums must stay nonzero
      Eigen::VectorXd cart = partial_cart + m.cartesian;
      const double den = a - (*x - cart).squaredNorm();
      if (den == 0.0) {
        pole = true;
        continue;
      }
      const double pmin = std::min(prefix_min, std::abs(den));
      const std::complex<double> num = numerator * m.value;
      const std::complex<double> dp = denominator_product * den;
      if (depth == k) {
        const std::complex<double> tail = pot->coefficient(-c);
        if (tail != std::complex<double>(0.0, 0.0)) {
          sum += num * tail / dp;
          min_denominator = std::min(min_denominator, pmin);
        }
      } else {
        recurse(depth + 1, c, cart, num, dp, pmin);
      }
    }
  }
};

std::vector<PotentialMode> modes_within(const FourierPotential& pot, double cutoff) {
  if (cutoff <= 0) return pot.support();
  std::vector<PotentialMode> out;
  for (const auto& m : pot.support())
    if (m.cartesian.norm() < cutoff) out.push_back(m);
  return out;
}

}  // namespace

SumResult S_k(double a, const Quasimomentum& x, const FourierPotential& pot,
              int k, const ExpansionOptions& opts) {
  if (k < 1) throw Error("S_k requires k >= 1");
  TupleSum ctx;
  auto modes = modes_within(pot, opts.cutoff);
  ctx.modes = &modes;
  ctx.pot = &pot;
  ctx.x = &x.point;
  ctx.a = a;
  ctx.k = k;
  if (!modes.empty()) {
    Eigen::VectorXi zero_coeffs = Eigen::VectorXi::Zero(x.point.size());
    Eigen::VectorXd zero_cart = Eigen::VectorXd::Zero(x.point.size());
    ctx.recurse(1, zero_coeffs, zero_cart, {1.0, 0.0}, {1.0, 0.0}, kInf);
  }
  SumResult r;
  r.value = ctx.sum;
  r.min_denominator = ctx.min_denominator;
  r.valid = !ctx.pole && ctx.min_denominator > opts.denominator_floor;
  return r;
}

SumResult A_m(double a, const Quasimomentum& x, const FourierPotential& pot,
              int m, const ExpansionOptions& opts) {
  if (m < 1) throw Error("A_m requires m >= 1");
  SumResult total;
  total.min_denominator = kInf;
  for (int k = 1; k <= m; ++k) {
    const SumResult r = S_k(a, x, pot, k, opts);
    total.value += r.value;
    total.min_denominator = std::min(total.min_denominator, r.min_denominator);
    total.valid = total.valid && r.valid;
  }
  return total;
}

FSequence F_sequence(const Quasimomentum& x, const FourierPotential& pot,
                     int k_max, const ExpansionOptions& opts) {
  if (k_max < 0) throw Error("F_sequence requires k_max >= 0");
  FSequence seq;
  seq.values.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  seq.min_denominator = kInf;
  const double x2 = x.squared_norm();
  for (int s = 1; s <= k_max; ++s) {
    const SumResult r = A_m(x2 + seq.values[s - 1], x, pot, s, opts);
    seq.max_imag = std::max(seq.max_imag, std::abs(r.value.imag()));
    seq.min_denominator = std::min(seq.min_denominator, r.min_denominator);
    seq.valid = seq.valid && r.valid;
    const double f = r.value.real();
    if (opts.divergence_bound > 0 && std::abs(f) > opts.divergence_bound)
      throw DivergenceDetected("F_" + std::to_string(s) + " = " +
                               std::to_string(f) + " exceeds the O(rho^{-alpha_1}) sanity bound");
    seq.values[s] = f;
  }
  return seq;
}

ExpansionOptions resolve_expansion_options(const ExpansionOptions& opts,
                                           const AsymptoticConstants& constants,
                                           double rho) {
  ExpansionOptions eff = opts;
  if (eff.denominator_floor <= 0)
    eff.denominator_floor = 0.5 * constants.slab_radius(rho, 1);
  if (eff.divergence_bound <= 0)
    eff.divergence_bound = 1e3 * std::pow(rho, -constants.alpha_of(1));
  return eff;
}

ExpansionReport predict_eigenvalue(const Quasimomentum& x,
                                   const FourierPotential& pot, int k_max,
                                   const AsymptoticConstants& constants,
                                   double rho, const ExpansionOptions& opts,
                                   const SpectralResult* oracle,
                                   double coeff_floor) {
  if (k_max < 1) throw Error("predict_eigenvalue requires k_max >= 1");
  const ExpansionOptions eff = resolve_expansion_options(opts, constants, rho);

  ExpansionReport report;
  report.x = x;
  report.epsilon1 = constants.eps1(rho);

  const FSequence seq = F_sequence(x, pot, k_max - 1, eff);
  report.iterability_min = seq.min_denominator;

  if (oracle) {
    auto [t, gamma] = pot.lattice().reduce_to_fundamental(x);
    if ((t.point - oracle->t().point).norm() > 1e-9)
      throw Error("predict_eigenvalue: oracle was solved at a different quasimomentum");
    const double window = 0.5 * constants.slab_radius(rho, 1);
    auto n = match_eigenvalue(*oracle, gamma, window, coeff_floor);
    if (n) {
      report.matched_index = *n;
      report.oracle_lambda = oracle->eigenvalue(*n);
    }
  }

  const double x2 = x.squared_norm();
  for (int k = 1; k <= k_max; ++k) {
    OrderReport row;
    row.k = k;
    row.f_prev = seq.values[k - 1];
    row.prediction = x2 + row.f_prev;
    row.valid = seq.valid;
    if (report.oracle_lambda) row.oracle_gap = *report.oracle_lambda - row.prediction;
    report.orders.push_back(row);
  }
  return report;
}

}  // namespace blochasym
