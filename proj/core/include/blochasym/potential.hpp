#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "blochasym/lattice.hpp"

namespace blochasym {

struct PotentialEntry {
  Eigen::VectorXi coeffs;
  std::complex<double> value;
};

// One stored Fourier mode with its cached Cartesian dual vector.
struct PotentialMode {
  Eigen::VectorXi coeffs;
  Eigen::VectorXd cartesian;
  std::complex<double> value;
};

struct TruncationReport {
  double radius = 0.0;
  std::size_t kept = 0;
  double tail_bound = 0.0;  // sum of |q_gamma| over dropped modes
};

// Finite trigonometric polynomial q(x) = sum q_gamma e^{i(gamma,x)} with
// q_0 = 0 and Hermitian symmetry q_{-gamma} = conj(q_gamma).  Missing
// conjugate partners are auto-completed; near-conjugate user pairs are
// symmetrized so the stored map is exactly Hermitian.
class FourierPotential {
 public:
  const LatticeBasis& lattice() const { return lattice_; }
  bool empty() const { return support_.empty(); }
  std::size_t size() const { return support_.size(); }

  // Modes sorted by (|gamma|, lex coeffs).
  const std::vector<PotentialMode>& support() const { return support_; }
  double max_support_norm() const { return max_norm_; }

  // q_gamma, zero off support.
  std::complex<double> coefficient(const Eigen::VectorXi& coeffs) const;

  // sum |q_gamma|^2 (1 + |gamma|^{2s}) over the support.
  double sobolev_norm_sq(double s) const;

  // Keeps modes with |gamma| < radius (strict); reports the l1 tail.
  std::pair<FourierPotential, TruncationReport> truncate(double radius) const;

  // q evaluated at a spatial point; real up to roundoff by construction.
  std::complex<double> evaluate(const Eigen::VectorXd& x) const;

 private:
  friend FourierPotential make_potential(const LatticeBasis&,
                                         const std::vector<PotentialEntry>&);
  FourierPotential() = default;

  LatticeBasis lattice_;
  std::map<std::vector<int>, std::complex<double>> coeffs_;
  std::vector<PotentialMode> support_;
  double max_norm_ = 0.0;
};

// Builds the potential from user entries.  gamma = 0 entries with nonzero
// value raise ZeroModeSupplied; conflicting conjugate pairs (mismatch above
// 1e-12) raise SymmetryConflict.
FourierPotential make_potential(const LatticeBasis& lattice,
                                const std::vector<PotentialEntry>& entries);

}  // namespace blochasym
