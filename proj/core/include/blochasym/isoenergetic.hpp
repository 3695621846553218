#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "blochasym/expansion.hpp"
#include "blochasym/resonance.hpp"

namespace blochasym {

struct KnownPart {
  double value = 0.0;  // |x|^2 + F_{k1'-1}(x)
  int order_used = 0;  // k1' = min(k1, cap)
  bool valid = true;
  double min_denominator = 0.0;
};

// The computable predictor F(x) of a non-resonance eigenvalue.  order_cap
// clamps k1 (default 4) since the nominal k1 is combinatorially generous.
KnownPart known_part(const Quasimomentum& x, const FourierPotential& pot,
                     const AsymptoticConstants& constants, double rho,
                     int order_cap = -1, const ExpansionOptions& opts = {});

enum class ClashKind { NonResClash, ResClash };

struct SimplicityViolation {
  LatticeVector gamma_prime;
  ClashKind kind = ClashKind::NonResClash;
  double gap = 0.0;  // the offending |F - F'| or |F - lambda_j|, below 2 eps1
};

struct SimplicityVerdict {
  Quasimomentum x;
  bool passed = false;
  double eps1 = 0.0;
  std::vector<SimplicityViolation> violations;
  std::size_t K_size = 0;
};

struct SimplicityOptions {
  double eps1_override = -1.0;  // > 0 replaces rho^{-d-2 alpha} (practical mode)
  int order_cap = -1;
  ExpansionOptions expansion;
  BlockOptions block;
};

// Conditions (11)-(12): scans K = { gamma' : | F(x) - |gamma'+t|^2 | <
// rho^{alpha_1}/3 } and flags competitors whose known part (non-resonant
// gamma'+t) or block eigenvalues near rho^2 (resonant gamma'+t) come within
// 2 eps1 of F(x).
SimplicityVerdict simplicity_check(const Quasimomentum& x,
                                   const FourierPotential& pot,
                                   const AsymptoticConstants& constants,
                                   double rho,
                                   const SimplicityOptions& opts = {});

struct ExclusionOptions {
  double pb_scan_radius = -1.0;    // default 2 rho + 3
  double pb_prefilter = 1.0;       // energy window for the cheap pre-filter
  int order_cap = -1;
  ExpansionOptions expansion;
  BlockOptions block;
};

struct ExclusionReport {
  std::vector<LatticeVector> in_Pb;           // b witnessing P_b membership
  std::vector<std::pair<int, int>> in_A_rho;  // (k, eigenvalue index)
  bool in_K_rho = false;
};

// Point predicates for the excluded sets P_b, A(rho), K_rho.
ExclusionReport excluded_set_membership(const Quasimomentum& x,
                                        const FourierPotential& pot,
                                        const AsymptoticConstants& constants,
                                        double rho,
                                        const ExclusionOptions& opts = {});

struct SurfaceWitness {
  Quasimomentum y;
  double rho = 0.0;
  double lambda_value = 0.0;
  double residual = 0.0;  // |Lambda(y) - rho^2|
  Quasimomentum bracket_lo, bracket_hi;  // a -+ eps e_i
  int eigen_index = -1;
  int bisection_steps = 0;
};

struct IsoOptions {
  double tol_scale = 1e-9;  // residual tolerance = tol_scale * rho^2
  int max_steps = 60;
  double min_overlap = 0.5;
  double coeff_floor = -1.0;    // default 1/rho
  double basis_radius = -1.0;   // default default_basis_radius(pot, rho)
};

// Bisection along axis e_i from the bracket a -+ eps e_i (either orientation
// accepted), tracking the eigenvalue by eigenvector overlap across solves.
SurfaceWitness find_isoenergetic_point(const Quasimomentum& a, int axis,
                                       double eps, double rho,
                                       const FourierPotential& pot,
                                       const AsymptoticConstants& constants,
                                       const IsoOptions& opts = {});

struct MeasureEstimate {
  double rho = 0.0;
  std::int64_t n_samples = 0;
  double fraction = 0.0;
  double stderr_value = 0.0;  // sqrt(f (1-f) / n)
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of the non-resonant share of the sphere |x| = rho at
// slab radius c8 * rho^{alpha_1}.  Samples are generated in fixed-size
// blocks with per-block substreams, so the result is bit-identical for any
// worker count.
MeasureEstimate measure_nonresonance_fraction(double rho,
                                              const AsymptoticConstants& constants,
                                              const LatticeBasis& lattice,
                                              double c8, std::int64_t n,
                                              std::uint64_t seed,
                                              int workers = 0);

// Deterministic d = 2 reference: the same predicate on a uniform angular grid.
double measure_fraction_grid_2d(double rho, const AsymptoticConstants& constants,
                                const LatticeBasis& lattice, double c8,
                                std::int64_t n_angles, int workers = 0);

struct CoverageDiagnostics {
  int tries = 0;
  int drop_resonant = 0;
  int drop_surface = 0;
  int drop_simplicity = 0;
  int drop_bracket = 0;
  int drop_tracking = 0;
};

struct CoverageOptions {
  bool practical_eps = true;   // eps1 from 0.1 x local level spacing
  double eps_override = -1.0;
  double eps1_override = -1.0;
  int order_cap = -1;
  IsoOptions iso;
};

struct CoverageResult {
  std::optional<SurfaceWitness> witness;
  CoverageDiagnostics diagnostics;
  double eps_used = 0.0;
  double eps1_used = 0.0;
};

// Samples sphere points, filters by classification and simplicity, moves the
// survivor onto the predictor surface F = rho^2 along its dominant axis, and
// closes with the oracle bisection.  Exhausted tries return diagnostics, not
// an error.
CoverageResult band_coverage_witness(double rho, const FourierPotential& pot,
                                     const AsymptoticConstants& constants,
                                     int max_tries, std::uint64_t seed,
                                     const CoverageOptions& opts = {});

}  // namespace blochasym
