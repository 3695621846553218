#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "blochasym/domains.hpp"
#include "blochasym/oracle.hpp"
#include "blochasym/potential.hpp"

namespace blochasym {

struct ExpansionOptions {
  // Tuple components come from the potential support restricted to
  // 0 < |gamma| < cutoff; non-positive means the whole (finite) support.
  double cutoff = -1.0;
  // Denominators at or below this floor mark the result invalid
  // (rho-aware callers use rho^{alpha_1}/2).  Results are still returned.
  double denominator_floor = 0.0;
  // |F_s| beyond this bound throws DivergenceDetected; non-positive disables.
  double divergence_bound = -1.0;
};

struct SumResult {
  std::complex<double> value{0.0, 0.0};
  // Smallest |denominator| seen along prefixes of contributing tuples;
  // +inf when nothing contributes.
  double min_denominator = 0.0;
  bool valid = true;
};

// S_k(a, x): sum over tuples (g_1..g_k) from the support with every partial
// sum g_1+..+g_j nonzero, of q_{g_1}..q_{g_k} q_{-g_1-..-g_k} divided by
// prod_j (a - |x - sum_{i<=j} g_i|^2).
SumResult S_k(double a, const Quasimomentum& x, const FourierPotential& pot,
              int k, const ExpansionOptions& opts = {});

// A_m = sum_{k=1}^m S_k(a, x).
SumResult A_m(double a, const Quasimomentum& x, const FourierPotential& pot,
              int m, const ExpansionOptions& opts = {});

struct FSequence {
  std::vector<double> values;  // F_0 .. F_{k_max}, F_0 = 0
  double min_denominator = 0.0;
  bool valid = true;
  double max_imag = 0.0;  // largest |Im A_s| dropped when taking real parts
};

// F_0 = 0, F_s = A_s(|x|^2 + F_{s-1}, x).
FSequence F_sequence(const Quasimomentum& x, const FourierPotential& pot,
                     int k_max, const ExpansionOptions& opts = {});

struct OrderReport {
  int k = 0;
  double f_prev = 0.0;      // F_{k-1}
  double prediction = 0.0;  // |x|^2 + F_{k-1}
  std::optional<double> oracle_gap;  // Lambda_N - prediction when matched
  bool valid = true;
};

struct ExpansionReport {
  Quasimomentum x;
  std::vector<OrderReport> orders;  // k = 1 .. k_max
  double iterability_min = 0.0;     // smallest |denominator| encountered
  double epsilon1 = 0.0;            // rho^{-d-2 alpha}
  std::optional<int> matched_index; // oracle eigenvalue index when supplied
  std::optional<double> oracle_lambda;
};

// Resolves rho-dependent defaults: denominator floor rho^{alpha_1}/2 and
// divergence bound 1e3 * rho^{-alpha_1} when the caller left them unset.
ExpansionOptions resolve_expansion_options(const ExpansionOptions& opts,
                                           const AsymptoticConstants& constants,
                                           double rho);

// Predictions |x|^2 + F_{k-1} for k = 1..k_max.  When an oracle result is
// supplied the matching eigenvalue (conditions (6)-(7) style window/floor)
// fills the per-order gaps.
ExpansionReport predict_eigenvalue(const Quasimomentum& x,
                                   const FourierPotential& pot, int k_max,
                                   const AsymptoticConstants& constants,
                                   double rho,
                                   const ExpansionOptions& opts = {},
                                   const SpectralResult* oracle = nullptr,
                                   double coeff_floor = 0.0);

}  // namespace blochasym
