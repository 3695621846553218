#pragma once

#include <optional>
#include <vector>

#include "blochasym/domains.hpp"
#include "blochasym/oracle.hpp"
#include "blochasym/potential.hpp"

namespace blochasym {

struct BlockOptions {
  // Overrides for the two enumeration radii; non-positive means the defaults
  // |b| < rho^{alpha_{k+1}/2}/2 and |a| < p1 * rho^alpha.
  double b_radius = -1.0;
  double a_radius = -1.0;
  int cap = 4000;
};

// The matrix C(gamma+t, gamma_1..gamma_k): points h_i + t from the fattened
// span lattice around the center, diagonal |h_i+t|^2, off-diagonal
// q_{h_i - h_j} (zero off support).
struct ResonanceBlock {
  Quasimomentum center;  // gamma + t, recomposed as gamma.cartesian + t
  Quasimomentum t;
  std::vector<LatticeVector> directions;
  // h_i as dual-lattice vectors; points[i] = lattice_points[i].cartesian + t.
  std::vector<LatticeVector> lattice_points;
  std::vector<Quasimomentum> points;
  int center_index = -1;
  Eigen::MatrixXcd matrix;

  int size() const { return static_cast<int>(points.size()); }
};

// The fattened point set {x + b + a} of the resonance block, deduplicated and
// ordered by (distance from x, lex coeffs).
std::vector<Quasimomentum> build_Bk_points(const Quasimomentum& x,
                                           const std::vector<LatticeVector>& dirs,
                                           const AsymptoticConstants& constants,
                                           double rho,
                                           const FourierPotential& pot,
                                           const BlockOptions& opts = {});

ResonanceBlock assemble_C(const Quasimomentum& x,
                          const std::vector<LatticeVector>& dirs,
                          const FourierPotential& pot,
                          const AsymptoticConstants& constants, double rho,
                          const BlockOptions& opts = {});

// Same block built from an already reduced center gamma + t.  Sharing the
// exact t with an oracle solve makes the block a bit-exact principal
// submatrix of the oracle matrix.
ResonanceBlock assemble_C_at(const Quasimomentum& t, const LatticeVector& gamma,
                             const std::vector<LatticeVector>& dirs,
                             const FourierPotential& pot,
                             const AsymptoticConstants& constants, double rho,
                             const BlockOptions& opts = {});

// Ascending eigenvalues of the block matrix.
Eigen::VectorXd block_eigenvalues(const ResonanceBlock& block);

struct ResonancePrediction {
  double lambda_j = 0.0;
  int j = -1;  // index into the ascending block spectrum
  std::optional<double> gap;          // Lambda_N - lambda_j when matched
  std::optional<int> matched_index;   // oracle eigenvalue index
  std::optional<double> oracle_lambda;
  int block_size = 0;
};

// Diagonalizes C and selects the eigenvalue nearest the matched oracle
// eigenvalue (nearest |x|^2 when no oracle is supplied).
ResonancePrediction resonance_predict(const Quasimomentum& x,
                                      const std::vector<LatticeVector>& dirs,
                                      const FourierPotential& pot,
                                      const AsymptoticConstants& constants,
                                      double rho,
                                      const SpectralResult* oracle = nullptr,
                                      double match_window = -1.0,
                                      double coeff_floor = 0.0,
                                      const BlockOptions& opts = {});

}  // namespace blochasym
