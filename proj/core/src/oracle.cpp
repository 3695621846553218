#include "blochasym/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace blochasym {

namespace {

std::vector<int> key_of(const Eigen::VectorXi& coeffs) {
  return std::vector<int>(coeffs.data(), coeffs.data() + coeffs.size());
}

}  // namespace

std::vector<LatticeVector> plane_wave_basis(const LatticeBasis& lattice,
                                            const Quasimomentum& t,
                                            double basis_radius, int cap) {
  if (basis_radius <= 0) throw Error("basis_radius must be positive");
  auto basis = lattice.ball_around(t.point, basis_radius);
  if (static_cast<int>(basis.size()) > cap)
    throw BasisTooLarge("plane-wave basis has " + std::to_string(basis.size()) +
                        " vectors (cap " + std::to_string(cap) + ")");
  if (basis.empty())
    throw Error("plane-wave basis is empty; increase basis_radius");
  return basis;
}

Eigen::MatrixXcd assemble_hamiltonian(const FourierPotential& pot,
                                      const Quasimomentum& t,
                                      const std::vector<LatticeVector>& basis,
                                      double diagonal_shift) {
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    h(i, i) = (basis[i].cartesian + t.point).squaredNorm() + diagonal_shift;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> q = pot.coefficient(basis[i].coeffs - basis[j].coeffs);
      h(i, j) = q;
      h(j, i) = std::conj(q);
    }
  return h;
}

SpectralResult bloch_eigen(const FourierPotential& pot, const Quasimomentum& t,
                           double basis_radius, const OracleOptions& opts) {
  SpectralResult res;
  res.t_ = t;
  res.basis_radius_ = basis_radius;
  res.basis_ = plane_wave_basis(pot.lattice(), t, basis_radius, opts.basis_cap);
  const int n = static_cast<int>(res.basis_.size());
  for (int i = 0; i < n; ++i) res.index_[key_of(res.basis_[i].coeffs)] = i;

  res.hamiltonian_ = assemble_hamiltonian(pot, t, res.basis_, opts.diagonal_shift);

  if (pot.empty()) {
    // Free operator: the matrix is diagonal, so sorting is an exact
    // diagonalization and the eigenvectors are coordinate vectors.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return res.hamiltonian_(a, a).real() < res.hamiltonian_(b, b).real();
    });
    res.eigenvalues_.resize(n);
    res.vectors_ = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      res.eigenvalues_[j] = res.hamiltonian_(order[j], order[j]).real();
      res.vectors_(order[j], j) = 1.0;
    }
    return res;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(res.hamiltonian_);
  if (solver.info() != Eigen::Success)
    throw DiagonalizationFailure("dense Hermitian eigensolver did not converge");
  res.eigenvalues_ = solver.eigenvalues();
  res.vectors_ = solver.eigenvectors();
  return res;
}

double default_basis_radius(const FourierPotential& pot, double rho_target) {
  return rho_target + std::max(8.0, 4.0 * pot.max_support_norm());
}

std::optional<int> SpectralResult::basis_index(const Eigen::VectorXi& coeffs) const {
  auto it = index_.find(key_of(coeffs));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::complex<double> SpectralResult::coefficient(int n, const LatticeVector& gamma) const {
  auto idx = basis_index(gamma.coeffs);
  if (!idx) throw Error("coefficient: gamma is not in the retained basis");
  return vectors_(*idx, n);
}

double SpectralResult::max_scaled_residual() const {
  const Eigen::MatrixXcd r =
      hamiltonian_ * vectors_ - vectors_ * eigenvalues_.asDiagonal();
  double worst = 0.0;
  for (int j = 0; j < size(); ++j) {
    const double scale = std::max(1.0, std::abs(eigenvalues_[j]));
    worst = std::max(worst, r.col(j).norm() / scale);
  }
  return worst;
}

double SpectralResult::max_parseval_defect() const {
  double worst = 0.0;
  for (int j = 0; j < size(); ++j)
    worst = std::max(worst, std::abs(vectors_.col(j).squaredNorm() - 1.0));
  return worst;
}

std::optional<int> match_eigenvalue(const SpectralResult& res,
                                    const LatticeVector& gamma,
                                    double window_halfwidth, double coeff_floor) {
  auto idx = res.basis_index(gamma.coeffs);
  if (!idx) throw Error("match_eigenvalue: gamma is not in the retained basis");
  const double target = (gamma.cartesian + res.t().point).squaredNorm();
  const auto& evals = res.eigenvalues();

  int best = -1;
  double best_coeff = -1.0;
  for (int n = 0; n < res.size(); ++n) {
    if (std::abs(evals[n] - target) >= window_halfwidth) continue;
    const double c = std::abs(res.vectors()(*idx, n));
    if (c > best_coeff) {
      best_coeff = c;
      best = n;
    }
  }
  if (best < 0 || best_coeff < coeff_floor) return std::nullopt;
  return best;
}

std::pair<int, double> track_by_overlap(const SpectralResult& from, int n_from,
                                        const SpectralResult& to) {
  // Map the source eigenvector into the target's index space, then one
  // adjoint product gives every overlap at once.
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(to.size());
  for (int i = 0; i < from.size(); ++i) {
    auto j = to.basis_index(from.basis()[i].coeffs);
    if (j) w[*j] = from.vectors()(i, n_from);
  }
  Eigen::VectorXcd overlaps = to.vectors().adjoint() * w;
  int best = 0;
  double best_abs = -1.0;
  for (int m = 0; m < to.size(); ++m) {
    const double a = std::abs(overlaps[m]);
    if (a > best_abs) {
      best_abs = a;
      best = m;
    }
  }
  return {best, best_abs};
}

Eigen::VectorXcd gauge_fixed_vector(const SpectralResult& res, int n,
                                    const LatticeVector& anchor) {
  const std::complex<double> b = res.coefficient(n, anchor);
  if (std::abs(b) == 0.0)
    throw Error("gauge_fixed_vector: anchor coefficient vanishes");
  const std::complex<double> phase = std::conj(b) / std::abs(b);
  return res.vectors().col(n) * phase;
}

double default_fd_step(const Quasimomentum& t) { return 1e-5 * (1.0 + t.norm()); }

Eigen::VectorXd eigenvalue_gradient_fd(const FourierPotential& pot,
                                       const Quasimomentum& t,
                                       double basis_radius, int n, double h,
                                       const OracleOptions& opts) {
  if (h <= 0) throw Error("finite-difference step must be positive");
  const SpectralResult base = bloch_eigen(pot, t, basis_radius, opts);
  if (n < 0 || n >= base.size()) throw Error("eigenvalue index out of range");

  const double diam = 2.0 * basis_radius;
  const double needed = 10.0 * h * (2.0 * t.norm() + diam);
  const double gap_lo = n > 0 ? base.eigenvalue(n) - base.eigenvalue(n - 1)
                              : std::numeric_limits<double>::infinity();
  const double gap_hi = n + 1 < base.size()
                            ? base.eigenvalue(n + 1) - base.eigenvalue(n)
                            : std::numeric_limits<double>::infinity();
  if (std::min(gap_lo, gap_hi) <= needed)
    throw NearDegenerate("eigenvalue gap " +
                         std::to_string(std::min(gap_lo, gap_hi)) +
                         " too small for FD step " + std::to_string(h));

  const int d = pot.lattice().dim();
  Eigen::VectorXd grad(d);
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd tp = t.point, tm = t.point;
    tp[j] += h;
    tm[j] -= h;
    const SpectralResult rp = bloch_eigen(pot, Quasimomentum{tp}, basis_radius, opts);
    const SpectralResult rm = bloch_eigen(pot, Quasimomentum{tm}, basis_radius, opts);
    const int np = track_by_overlap(base, n, rp).first;
    const int nm = track_by_overlap(base, n, rm).first;
    grad[j] = (rp.eigenvalue(np) - rm.eigenvalue(nm)) / (2.0 * h);
  }
  return grad;
}

}  // namespace blochasym
