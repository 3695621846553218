#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "blochasym/errors.hpp"

namespace blochasym {

// A dual-lattice vector, stored both as integer coordinates in the dual basis
// and as the cached Cartesian product dual_basis * coeffs.
struct LatticeVector {
  Eigen::VectorXi coeffs;
  Eigen::VectorXd cartesian;

  double norm() const { return cartesian.norm(); }
  bool is_zero() const { return coeffs.isZero(); }
};

inline bool same_coeffs(const LatticeVector& a, const LatticeVector& b) {
  return a.coeffs.size() == b.coeffs.size() && a.coeffs == b.coeffs;
}

// A point of momentum space: t, gamma + t, or a generic x.
struct Quasimomentum {
  Eigen::VectorXd point;

  double squared_norm() const { return point.squaredNorm(); }
  double norm() const { return point.norm(); }
};

// Period lattice with unit cell volume, its dual, and lattice-ball
// enumeration.  Constructed through make_lattice; immutable afterwards.
class LatticeBasis {
 public:
  static constexpr std::int64_t kDefaultBallCap = 10'000'000;

  int dim() const { return dim_; }
  // Columns generate the period lattice; rescaled so |det| = 1.
  const Eigen::MatrixXd& basis() const { return basis_; }
  // Columns generate the dual lattice: dual = 2*pi*(basis^T)^{-1}.
  const Eigen::MatrixXd& dual_basis() const { return dual_; }
  double cell_volume() const { return cell_volume_; }

  LatticeVector vector(const Eigen::VectorXi& coeffs) const;

  // All gamma with |gamma| < radius (strict), sorted by (|gamma|, lex coeffs).
  std::vector<LatticeVector> ball(double radius, bool exclude_zero,
                                  std::int64_t cap = kDefaultBallCap) const;

  // All gamma with |gamma + shift| < radius (strict), sorted by
  // (|gamma + shift|, lex coeffs).
  std::vector<LatticeVector> ball_around(const Eigen::VectorXd& shift,
                                         double radius,
                                         std::int64_t cap = kDefaultBallCap) const;

  // Splits x = gamma + t with the dual-basis coordinates of t in [0, 1).
  std::pair<Quasimomentum, LatticeVector> reduce_to_fundamental(
      const Quasimomentum& x) const;

  // Empty until assigned from make_lattice.
  LatticeBasis() = default;

 private:
  friend LatticeBasis make_lattice(const Eigen::MatrixXd&);

  int dim_ = 0;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd dual_;
  Eigen::MatrixXd dual_inv_;  // = basis^T / (2*pi)
  double cell_volume_ = 0.0;
};

// Normalizes the supplied basis to unit cell volume and computes the dual.
// Throws SingularBasis when |det| <= 1e-10.
LatticeBasis make_lattice(const Eigen::MatrixXd& basis);

inline bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace blochasym
