#include "blochasym/resonance.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace blochasym {

namespace {

std::vector<int> key_of(const Eigen::VectorXi& coeffs) {
  return std::vector<int>(coeffs.data(), coeffs.data() + coeffs.size());
}

ResonanceBlock build_points(const Quasimomentum& t, const LatticeVector& gamma_head,
                            const std::vector<LatticeVector>& dirs,
                            const FourierPotential& pot,
                            const AsymptoticConstants& constants, double rho,
                            const BlockOptions& opts) {
  if (dirs.empty()) throw Error("resonance block needs at least one direction");
  const LatticeBasis& lat = pot.lattice();
  const int d = lat.dim();
  const int k = static_cast<int>(dirs.size());
  const Eigen::VectorXd x_ref = gamma_head.cartesian + t.point;

  // Directions must be linearly independent (Gram determinant check).
  Eigen::MatrixXd m(d, k);
  for (int i = 0; i < k; ++i) m.col(i) = dirs[i].cartesian;
  Eigen::MatrixXd gram = m.transpose() * m;
  if (std::abs(gram.determinant()) <= 1e-10)
    throw Error("resonance directions are linearly dependent");

  const double b_radius =
      opts.b_radius > 0 ? opts.b_radius
                        : 0.5 * std::pow(rho, 0.5 * constants.alpha_of(k + 1));
  const double a_radius = opts.a_radius > 0
                              ? opts.a_radius
                              : constants.p1 * std::pow(rho, constants.alpha);

  // Integer combinations b = sum n_i gamma_i with |b| < b_radius:
  // |n| <= b_radius / sqrt(lambda_min(Gram)).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram);
  const double lam_min = ges.eigenvalues().minCoeff();
  if (lam_min <= 0) throw Error("degenerate direction Gram matrix");
  const long nb = static_cast<long>(std::floor(b_radius / std::sqrt(lam_min) + 1e-9));
  double box = 1.0;
  for (int i = 0; i < k; ++i) box *= static_cast<double>(2 * nb + 1);
  if (box > 1e7)
    throw BlockTooLarge("span enumeration box of " + std::to_string(box) +
                        " combinations");

  std::vector<Eigen::VectorXi> b_coeffs;
  Eigen::VectorXi n = Eigen::VectorXi::Constant(k, static_cast<int>(-nb));
  while (true) {
    Eigen::VectorXd cart = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < k; ++i) cart += double(n[i]) * dirs[i].cartesian;
    if (cart.norm() < b_radius) {
      Eigen::VectorXi c = Eigen::VectorXi::Zero(d);
      for (int i = 0; i < k; ++i) c += n[i] * dirs[i].coeffs;
      b_coeffs.push_back(c);
    }
    int axis = 0;
    while (axis < k) {
      if (n[axis] < nb) {
        ++n[axis];
        for (int j = 0; j < axis; ++j) n[j] = static_cast<int>(-nb);
        break;
      }
      ++axis;
    }
    if (axis == k) break;
  }

  const auto a_ball = lat.ball(a_radius, /*exclude_zero=*/false);
  if (a_ball.empty()) throw Error("fattening ball is empty");

  std::map<std::vector<int>, Eigen::VectorXi> seen;
  for (const auto& b : b_coeffs)
    for (const auto& a : a_ball) {
      Eigen::VectorXi total = gamma_head.coeffs + b + a.coeffs;
      seen.emplace(key_of(total), total);
      if (static_cast<int>(seen.size()) > opts.cap)
        throw BlockTooLarge("resonance block exceeds cap of " +
                            std::to_string(opts.cap) + " points");
    }

  ResonanceBlock block;
  block.t = t;
  block.center = Quasimomentum{gamma_head.cartesian + t.point};
  block.directions = dirs;

  struct Item {
    LatticeVector lv;
    Eigen::VectorXd point;
    double dist;
  };
  std::vector<Item> items;
  items.reserve(seen.size());
  for (const auto& [key, total] : seen) {
    Item it;
    it.lv = lat.vector(total);
    it.point = it.lv.cartesian + t.point;
    it.dist = (it.point - x_ref).norm();
    items.push_back(std::move(it));
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return lex_less(a.lv.coeffs, b.lv.coeffs);
  });

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].lv.coeffs == gamma_head.coeffs)
      block.center_index = static_cast<int>(i);
    block.lattice_points.push_back(std::move(items[i].lv));
    block.points.push_back(Quasimomentum{std::move(items[i].point)});
  }
  if (block.center_index < 0) throw Error("resonance block lost its center point");
  return block;
}

}  // namespace

std::vector<Quasimomentum> build_Bk_points(const Quasimomentum& x,
                                           const std::vector<LatticeVector>& dirs,
                                           const AsymptoticConstants& constants,
                                           double rho,
                                           const FourierPotential& pot,
                                           const BlockOptions& opts) {
  auto [t, gamma] = pot.lattice().reduce_to_fundamental(x);
  return build_points(t, gamma, dirs, pot, constants, rho, opts).points;
}

ResonanceBlock assemble_C(const Quasimomentum& x,
                          const std::vector<LatticeVector>& dirs,
                          const FourierPotential& pot,
                          const AsymptoticConstants& constants, double rho,
                          const BlockOptions& opts) {
  auto [t, gamma] = pot.lattice().reduce_to_fundamental(x);
  return assemble_C_at(t, gamma, dirs, pot, constants, rho, opts);
}

ResonanceBlock assemble_C_at(const Quasimomentum& t, const LatticeVector& gamma,
                             const std::vector<LatticeVector>& dirs,
                             const FourierPotential& pot,
                             const AsymptoticConstants& constants, double rho,
                             const BlockOptions& opts) {
  ResonanceBlock block = build_points(t, gamma, dirs, pot, constants, rho, opts);
  const int n = block.size();
  block.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    block.matrix(i, i) = block.points[i].squared_norm();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> q = pot.coefficient(block.lattice_points[i].coeffs -
                                                     block.lattice_points[j].coeffs);
      block.matrix(i, j) = q;
      block.matrix(j, i) = std::conj(q);
    }
  return block;
}

Eigen::VectorXd block_eigenvalues(const ResonanceBlock& block) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block.matrix,
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw DiagonalizationFailure("resonance block eigensolver did not converge");
  return solver.eigenvalues();
}

ResonancePrediction resonance_predict(const Quasimomentum& x,
                                      const std::vector<LatticeVector>& dirs,
                                      const FourierPotential& pot,
                                      const AsymptoticConstants& constants,
                                      double rho, const SpectralResult* oracle,
                                      double match_window, double coeff_floor,
                                      const BlockOptions& opts) {
  const ResonanceBlock block = assemble_C(x, dirs, pot, constants, rho, opts);
  const Eigen::VectorXd lam = block_eigenvalues(block);

  ResonancePrediction pred;
  pred.block_size = block.size();

  double target = x.squared_norm();
  if (oracle) {
    auto [t, gamma] = pot.lattice().reduce_to_fundamental(x);
    if ((t.point - oracle->t().point).norm() > 1e-9)
      throw Error("resonance_predict: oracle was solved at a different quasimomentum");
    const double window =
        match_window > 0 ? match_window : 0.5 * constants.slab_radius(rho, 1);
    auto n = match_eigenvalue(*oracle, gamma, window, coeff_floor);
    if (!n) throw NoOracleMatch("no oracle eigenvalue matches the block center");
    pred.matched_index = *n;
    pred.oracle_lambda = oracle->eigenvalue(*n);
    target = *pred.oracle_lambda;
  }

  int best = 0;
  for (int j = 1; j < lam.size(); ++j)
    if (std::abs(lam[j] - target) < std::abs(lam[best] - target)) best = j;
  pred.j = best;
  pred.lambda_j = lam[best];
  if (pred.oracle_lambda) pred.gap = *pred.oracle_lambda - pred.lambda_j;
  return pred;
}

}  // namespace blochasym
