#pragma once

#include <complex>
#include <vector>

#include "blochasym/expansion.hpp"

namespace blochasym {

// Off-center spectral mass 1 - |b(N, gamma)|^2 (the remainder of Parseval).
double tail_mass(const SpectralResult& res, int n, const LatticeVector& gamma);

struct ACoeffResult {
  std::complex<double> value{0.0, 0.0};
  double min_denominator = 0.0;
  bool valid = true;
};

// The order-k coefficient functional:
//   A_1(g') = q_{g'} / (P - |x + g'|^2),
//   A_k(g') = sum over (g_1..g_{k-1}) from the support, partial offsets
//             g' - g_1 - .. - g_j nonzero, of
//             q_{g_1}..q_{g_{k-1}} q_{g'-g_1-..-g_{k-1}}
//             / prod_{j=0}^{k-1} (P - |x + g' - sum_{i<=j} g_i|^2).
ACoeffResult A_coeff(const LatticeVector& gamma_prime, const Quasimomentum& x,
                     const FourierPotential& pot, int k, double P,
                     double denominator_floor = 0.0);

struct BlochOffset {
  LatticeVector gamma_prime;
  std::complex<double> value;  // predicted b(N, gamma + gamma_prime)
};

struct BlochPrediction {
  Quasimomentum x;
  int order = 0;          // n
  double b_center = 0.0;  // predicted b(N, gamma), gauge arg = 0
  std::vector<BlochOffset> offsets;  // gamma_prime != 0, sorted (norm, lex)
  double P_value = 0.0;
  double normalizer = 1.0;  // 1 + sum_k sum_{g*} |A_k(g*)|^2
  bool valid = true;
  double min_denominator = 0.0;
};

struct BlochOptions {
  // Order cap on the F-sequence feeding P(gamma+t); the nominal floor(p/3)
  // is clamped to this.  Negative means the default of 4.
  int p_order_cap = -1;
  ExpansionOptions expansion;
};

// Coefficient predictions to order n >= 2: center amplitude per the
// normalizer (1 + sum_k sum |A_k|^2)^{-1/2}, offsets (sum_k A_k(g'))
// times the same normalizer, enumerated over the k-fold support sums
// reachable with nonzero numerator for k <= n-1.
BlochPrediction predict_coefficients(const Quasimomentum& x,
                                     const FourierPotential& pot, int n,
                                     const AsymptoticConstants& constants,
                                     double rho, const BlochOptions& opts = {});

}  // namespace blochasym
