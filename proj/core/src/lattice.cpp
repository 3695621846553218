#include "blochasym/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace blochasym {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

LatticeBasis make_lattice(const Eigen::MatrixXd& basis) {
  if (basis.rows() != basis.cols())
    throw SingularBasis("lattice basis must be square");
  const int d = static_cast<int>(basis.rows());
  if (d < 2) throw SingularBasis("lattice dimension must be >= 2");
  const double det = basis.determinant();
  if (std::abs(det) <= 1e-10)
    throw SingularBasis("lattice basis is singular: |det| = " +
                        std::to_string(std::abs(det)));

  LatticeBasis lat;
  lat.dim_ = d;
  // Unit cell volume convention: rescale so that |det| = 1.
  lat.basis_ = basis * std::pow(std::abs(det), -1.0 / d);
  lat.dual_ = kTwoPi * lat.basis_.transpose().inverse();
  lat.dual_inv_ = lat.basis_.transpose() / kTwoPi;
  lat.cell_volume_ = std::abs(lat.basis_.determinant());

  // (dual_i, basis_j) = 2*pi*delta_ij, up to 1e-12 relative.
  Eigen::MatrixXd gram = lat.dual_.transpose() * lat.basis_;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double expect = (i == j) ? kTwoPi : 0.0;
      if (std::abs(gram(i, j) - expect) > 1e-12 * kTwoPi)
        throw SingularBasis("dual basis construction failed biorthogonality");
    }
  return lat;
}

LatticeVector LatticeBasis::vector(const Eigen::VectorXi& coeffs) const {
  LatticeVector v;
  v.coeffs = coeffs;
  v.cartesian = dual_ * coeffs.cast<double>();
  return v;
}

std::vector<LatticeVector> LatticeBasis::ball_around(
    const Eigen::VectorXd& shift, double radius, std::int64_t cap) const {
  std::vector<LatticeVector> out;
  if (radius <= 0.0) return out;

  // gamma = dual * n; |dual*n + shift| < r bounds every integer coordinate by
  // n_i in center +- r*||row_i(dual^{-1})||.
  const Eigen::VectorXd center = -(dual_inv_ * shift);
  std::vector<long> lo(dim_), hi(dim_);
  double predicted = 1.0;
  for (int i = 0; i < dim_; ++i) {
    const double w = dual_inv_.row(i).norm() * radius;
    lo[i] = static_cast<long>(std::ceil(center[i] - w - 1e-9));
    hi[i] = static_cast<long>(std::floor(center[i] + w + 1e-9));
    if (hi[i] < lo[i]) return out;
    predicted *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (predicted > static_cast<double>(cap))
    throw BallTooLarge("lattice ball enumeration would visit " +
                       std::to_string(predicted) + " candidates (cap " +
                       std::to_string(cap) + ")");

  Eigen::VectorXi n(dim_);
  for (int i = 0; i < dim_; ++i) n[i] = static_cast<int>(lo[i]);

  std::vector<double> keys;
  while (true) {
    Eigen::VectorXd cart = dual_ * n.cast<double>();
    const double dist = (cart + shift).norm();
    if (dist < radius) {
      out.push_back(LatticeVector{n, std::move(cart)});
      keys.push_back(dist);
    }
    int axis = 0;
    while (axis < dim_) {
      if (n[axis] < hi[axis]) {
        ++n[axis];
        for (int j = 0; j < axis; ++j) n[j] = static_cast<int>(lo[j]);
        break;
      }
      ++axis;
    }
    if (axis == dim_) break;
  }

  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return lex_less(out[a].coeffs, out[b].coeffs);
  });
  std::vector<LatticeVector> sorted;
  sorted.reserve(out.size());
  for (std::size_t i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

std::vector<LatticeVector> LatticeBasis::ball(double radius, bool exclude_zero,
                                              std::int64_t cap) const {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim_);
  std::vector<LatticeVector> all = ball_around(zero, radius, cap);
  if (!exclude_zero) return all;
  std::vector<LatticeVector> out;
  out.reserve(all.size());
  for (auto& v : all)
    if (!v.is_zero()) out.push_back(std::move(v));
  return out;
}

std::pair<Quasimomentum, LatticeVector> LatticeBasis::reduce_to_fundamental(
    const Quasimomentum& x) const {
  const Eigen::VectorXd c = dual_inv_ * x.point;
  Eigen::VectorXi n(dim_);
  Eigen::VectorXd frac(dim_);
  for (int i = 0; i < dim_; ++i) {
    const double f = std::floor(c[i]);
    n[i] = static_cast<int>(f);
    frac[i] = c[i] - f;
  }
  Quasimomentum t{dual_ * frac};
  return {std::move(t), vector(n)};
}

}  // namespace blochasym
