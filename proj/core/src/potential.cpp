#include "blochasym/potential.hpp"

#include <algorithm>
#include <cmath>

namespace blochasym {

namespace {

std::vector<int> key_of(const Eigen::VectorXi& coeffs) {
  return std::vector<int>(coeffs.data(), coeffs.data() + coeffs.size());
}

Eigen::VectorXi coeffs_of(const std::vector<int>& key) {
  Eigen::VectorXi c(static_cast<Eigen::Index>(key.size()));
  for (std::size_t i = 0; i < key.size(); ++i) c[static_cast<Eigen::Index>(i)] = key[i];
  return c;
}

std::vector<int> negate(const std::vector<int>& key) {
  std::vector<int> out(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) out[i] = -key[i];
  return out;
}

}  // namespace

FourierPotential make_potential(const LatticeBasis& lattice,
                                const std::vector<PotentialEntry>& entries) {
  FourierPotential pot;
  pot.lattice_ = lattice;

  std::map<std::vector<int>, std::complex<double>> m;
  for (const auto& e : entries) {
    if (e.coeffs.size() != lattice.dim())
      throw Error("potential entry has wrong dimension");
    if (e.coeffs.isZero()) {
      if (std::abs(e.value) > 1e-14)
        throw ZeroModeSupplied("gamma = 0 must have zero coefficient (mean-zero potential)");
      continue;
    }
    auto key = key_of(e.coeffs);
    auto it = m.find(key);
    if (it != m.end()) {
      if (std::abs(it->second - e.value) > 1e-12)
        throw SymmetryConflict("duplicate entry for the same gamma with different values");
    } else {
      m.emplace(std::move(key), e.value);
    }
  }

  // Complete or symmetrize conjugate partners so q_{-gamma} == conj(q_gamma)
  // holds exactly in storage.
  auto snapshot = m;
  for (const auto& [key, value] : snapshot) {
    const auto nkey = negate(key);
    auto it = m.find(nkey);
    if (it == m.end()) {
      m.emplace(nkey, std::conj(value));
    } else {
      if (std::abs(std::conj(value) - it->second) > 1e-12)
        throw SymmetryConflict("q_{-gamma} != conj(q_gamma) beyond 1e-12");
      if (key < nkey) {
        const std::complex<double> sym = 0.5 * (value + std::conj(it->second));
        m[key] = sym;
        m[nkey] = std::conj(sym);
      }
    }
  }

  pot.coeffs_ = std::move(m);
  pot.support_.reserve(pot.coeffs_.size());
  for (const auto& [key, value] : pot.coeffs_) {
    PotentialMode mode;
    mode.coeffs = coeffs_of(key);
    mode.cartesian = lattice.dual_basis() * mode.coeffs.cast<double>();
    mode.value = value;
    pot.support_.push_back(std::move(mode));
  }
  std::sort(pot.support_.begin(), pot.support_.end(),
            [](const PotentialMode& a, const PotentialMode& b) {
              const double na = a.cartesian.norm(), nb = b.cartesian.norm();
              if (na != nb) return na < nb;
              return lex_less(a.coeffs, b.coeffs);
            });
  pot.max_norm_ = pot.support_.empty() ? 0.0 : pot.support_.back().cartesian.norm();
  return pot;
}

std::complex<double> FourierPotential::coefficient(const Eigen::VectorXi& coeffs) const {
  auto it = coeffs_.find(key_of(coeffs));
  return it == coeffs_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

double FourierPotential::sobolev_norm_sq(double s) const {
  if (s < 0) throw Error("sobolev_norm_sq requires s >= 0");
  double sum = 0.0;
  for (const auto& mode : support_) {
    const double n2 = mode.cartesian.squaredNorm();
    sum += std::norm(mode.value) * (1.0 + std::pow(n2, s));
  }
  return sum;
}

std::pair<FourierPotential, TruncationReport> FourierPotential::truncate(
    double radius) const {
  if (radius <= 0) throw Error("truncate requires radius > 0");
  std::vector<PotentialEntry> kept;
  TruncationReport report;
  report.radius = radius;
  for (const auto& mode : support_) {
    if (mode.cartesian.norm() < radius) {
      kept.push_back(PotentialEntry{mode.coeffs, mode.value});
    } else {
      report.tail_bound += std::abs(mode.value);
    }
  }
  report.kept = kept.size();
  return {make_potential(lattice_, kept), report};
}

std::complex<double> FourierPotential::evaluate(const Eigen::VectorXd& x) const {
  std::complex<double> sum(0.0, 0.0);
  for (const auto& mode : support_) {
    const double phase = mode.cartesian.dot(x);
    sum += mode.value * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum;
}

}  // namespace blochasym
