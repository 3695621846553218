#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "blochasym/potential.hpp"

namespace blochasym {

struct OracleOptions {
  int basis_cap = 20000;
  double diagonal_shift = 0.0;
};

// Full spectrum of the truncated Bloch fiber L_t(q) in the plane-wave basis
// {e^{i(gamma+t,x)} : |gamma+t| < basis_radius}.  This is the ground truth
// every asymptotic formula is compared against.
class SpectralResult {
 public:
  const Quasimomentum& t() const { return t_; }
  double basis_radius() const { return basis_radius_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }
  const std::vector<LatticeVector>& basis() const { return basis_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int n) const { return eigenvalues_[n]; }
  // Column n is the coefficient vector of the n-th eigenfunction.
  const Eigen::MatrixXcd& vectors() const { return vectors_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }

  std::optional<int> basis_index(const Eigen::VectorXi& coeffs) const;
  // b(N, gamma); gamma must be in the basis.
  std::complex<double> coefficient(int n, const LatticeVector& gamma) const;

  // max over N of || (H - Lambda_N) v_N || / max(1, |Lambda_N|).
  double max_scaled_residual() const;
  // max over N of | sum |b|^2 - 1 |.
  double max_parseval_defect() const;

 private:
  friend SpectralResult bloch_eigen(const FourierPotential&, const Quasimomentum&,
                                    double, const OracleOptions&);
  Quasimomentum t_;
  double basis_radius_ = 0.0;
  std::vector<LatticeVector> basis_;
  std::map<std::vector<int>, int> index_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd vectors_;
  Eigen::MatrixXcd hamiltonian_;
};

// Basis selection rule: all gamma with |gamma + t| < basis_radius.
std::vector<LatticeVector> plane_wave_basis(const LatticeBasis& lattice,
                                            const Quasimomentum& t,
                                            double basis_radius, int cap);

Eigen::MatrixXcd assemble_hamiltonian(const FourierPotential& pot,
                                      const Quasimomentum& t,
                                      const std::vector<LatticeVector>& basis,
                                      double diagonal_shift = 0.0);

// Dense Hermitian diagonalization of the truncated fiber.  The free operator
// (empty potential) is diagonal and is solved exactly by sorting.
SpectralResult bloch_eigen(const FourierPotential& pot, const Quasimomentum& t,
                           double basis_radius, const OracleOptions& opts = {});

// rho_target + max(8, 4 * max support norm): couplings only reach
// support-norm far, eigenvalues of interest sit near rho^2.
double default_basis_radius(const FourierPotential& pot, double rho_target);

// Among N with |Lambda_N - |gamma+t|^2| < window_halfwidth, the N maximizing
// |b(N, gamma)| (lowest index on ties); nullopt when the best coefficient is
// below coeff_floor or the window is empty.
std::optional<int> match_eigenvalue(const SpectralResult& res,
                                    const LatticeVector& gamma,
                                    double window_halfwidth, double coeff_floor);

// |<v_a(n_a), v_b(m)>| maximized over m; the overlap is computed over shared
// basis vectors (matched by integer coordinates).
std::pair<int, double> track_by_overlap(const SpectralResult& from, int n_from,
                                        const SpectralResult& to);

// Eigenvector of n rotated so that arg b(n, anchor) = 0.
Eigen::VectorXcd gauge_fixed_vector(const SpectralResult& res, int n,
                                    const LatticeVector& anchor);

// Central finite differences (Lambda_N(t+h e_j) - Lambda_N(t-h e_j)) / (2h),
// with the eigenvalue tracked across solves by eigenvector overlap.  Requires
// Lambda_N isolated: gap > 10*h*(2|t| + 2*basis_radius).
Eigen::VectorXd eigenvalue_gradient_fd(const FourierPotential& pot,
                                       const Quasimomentum& t,
                                       double basis_radius, int n, double h,
                                       const OracleOptions& opts = {});

double default_fd_step(const Quasimomentum& t);

}  // namespace blochasym
