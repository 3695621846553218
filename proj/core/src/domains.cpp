#include "blochasym/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blochasym {

double AsymptoticConstants::alpha_of(int k) const {
  double a = alpha;
  for (int i = 0; i < k; ++i) a *= 3.0;
  return a;
}

double AsymptoticConstants::eps1(double rho) const {
  return std::pow(rho, -static_cast<double>(d) - 2.0 * alpha);
}

double AsymptoticConstants::slab_radius(double rho, int k) const {
  return std::pow(rho, alpha_of(k));
}

AsymptoticConstants asymptotic_constants(int d, double s) {
  if (d < 2) throw Error("asymptotic_constants requires d >= 2");
  if (s <= d) throw Error("asymptotic_constants requires s > d");

  AsymptoticConstants c;
  c.d = d;
  c.s = s;
  int pow3 = 1;
  for (int i = 0; i < d; ++i) pow3 *= 3;
  c.q_exp = pow3 + d + 2;
  c.alpha = 1.0 / c.q_exp;
  for (int k = 1; k <= d; ++k) c.alpha_k.push_back(c.alpha_of(k));
  c.p = s - d;
  c.p1 = static_cast<int>(std::floor(c.p / 3.0)) + 1;
  c.k1 = (d * c.q_exp) / 3 + 2;  // floor(d/(3 alpha)) with alpha = 1/q exact
  c.s0 = 0.5 * (3.0 * d - 1.0) * c.q_exp + 0.25 * d * pow3 + d + 6.0;
  c.smoothness_ok = s >= c.s0;

  const double a = c.alpha, a1 = c.alpha_of(1), ad = c.alpha_of(d);
  auto push = [&](std::string name, double margin) {
    c.inequality_report.push_back({std::move(name), margin > 0.0, margin});
  };
  push("alpha_1 + d*alpha < 1 - alpha", (1.0 - a) - (a1 + d * a));
  push("d*alpha < alpha_d / 2", 0.5 * ad - d * a);
  push("k_1 <= (p - q(d-1)/2) / 3",
       (c.p - 0.5 * c.q_exp * (d - 1)) / 3.0 - c.k1);
  push("p_1*alpha_1 >= p*alpha", c.p1 * a1 - c.p * a);
  push("3*k_1*alpha > d + 2*alpha", 3.0 * c.k1 * a - (d + 2.0 * a));
  double worst6 = std::numeric_limits<double>::infinity();
  double worst7 = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= d; ++k) {
    worst6 = std::min(worst6, 1.0 - (c.alpha_of(k) + (k - 1) * a));
    worst7 = std::min(worst7, c.alpha_of(k + 1) - 2.0 * (c.alpha_of(k) + (k - 1) * a));
  }
  push("alpha_k + (k-1)*alpha < 1, k=1..d", worst6);
  push("alpha_{k+1} > 2(alpha_k + (k-1)*alpha), k=1..d", worst7);
  return c;
}

SlabResult in_resonance_slab(const Quasimomentum& x, const LatticeVector& b,
                             double radius) {
  if (b.is_zero()) throw Error("in_resonance_slab requires b != 0");
  const double defect =
      std::abs(-2.0 * x.point.dot(b.cartesian) - b.cartesian.squaredNorm());
  return {defect < radius, radius - defect};
}

namespace {

double slab_defect(const Eigen::VectorXd& x, const LatticeVector& b) {
  return std::abs(-2.0 * x.dot(b.cartesian) - b.cartesian.squaredNorm());
}

// Greedy matroid pass: scanning candidates in (norm, lex) order and keeping
// rank-increasing ones yields a maximal independent subset, so the number of
// picks equals the rank of the in-slab candidate set.
struct GreedyPick {
  std::vector<const LatticeVector*> dirs;
  std::vector<double> defects;
};

GreedyPick greedy_independent_in_slabs(const Eigen::VectorXd& x,
                                       const std::vector<LatticeVector>& candidates,
                                       double radius, int max_rank) {
  GreedyPick picked;
  std::vector<Eigen::VectorXd> ortho;
  for (const auto& b : candidates) {
    const double defect = slab_defect(x, b);
    if (defect >= radius) continue;
    Eigen::VectorXd r = b.cartesian;
    for (const auto& u : ortho) r -= u.dot(r) * u;
    if (r.norm() <= 1e-8 * b.cartesian.norm()) continue;
    ortho.push_back(r.normalized());
    picked.dirs.push_back(&b);
    picked.defects.push_back(defect);
    if (static_cast<int>(picked.dirs.size()) == max_rank) break;
  }
  return picked;
}

}  // namespace

DomainClass classify_with_directions(const Quasimomentum& x, double rho,
                                     const AsymptoticConstants& constants,
                                     const std::vector<LatticeVector>& directions,
                                     const ClassifyOptions& opts) {
  const int d = static_cast<int>(x.point.size());
  DomainClass result;

  // Resonance is decided by E_1 alone: NonResonant iff no slab of radius
  // rho^{alpha_1} contains x.  The k-search below only refines within E_1.
  if (is_nonresonant(x, rho, constants, directions, opts.slab_scale))
    return result;

  int best_k = 1;
  for (int k = 2; k <= d; ++k) {
    const double radius = opts.slab_scale * constants.slab_radius(rho, k);
    const GreedyPick picked =
        greedy_independent_in_slabs(x.point, directions, radius, d);
    if (static_cast<int>(picked.dirs.size()) >= k) best_k = k;
  }

  const double radius = opts.slab_scale * constants.slab_radius(rho, best_k);
  const GreedyPick picked =
      greedy_independent_in_slabs(x.point, directions, radius, best_k);
  result.kind = DomainKind::Resonant;
  result.k = best_k;
  for (std::size_t i = 0; i < picked.dirs.size(); ++i) {
    result.directions.push_back(*picked.dirs[i]);
    result.slab_defects.push_back(picked.defects[i]);
  }
  return result;
}

DomainClass classify(const Quasimomentum& x, double rho,
                     const AsymptoticConstants& constants,
                     const LatticeBasis& lattice, const ClassifyOptions& opts) {
  const double mult =
      opts.dir_ball_multiplier > 0 ? opts.dir_ball_multiplier : constants.p;
  const auto directions =
      lattice.ball(mult * std::pow(rho, constants.alpha), /*exclude_zero=*/true);
  return classify_with_directions(x, rho, constants, directions, opts);
}

bool is_nonresonant(const Quasimomentum& x, double rho,
                    const AsymptoticConstants& constants,
                    const std::vector<LatticeVector>& directions,
                    double slab_scale) {
  const double radius = slab_scale * constants.slab_radius(rho, 1);
  for (const auto& b : directions)
    if (slab_defect(x.point, b) < radius) return false;
  return true;
}

}  // namespace blochasym
