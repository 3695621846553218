#pragma once

#include <string>
#include <vector>

#include "blochasym/lattice.hpp"

namespace blochasym {

struct InequalityCheck {
  std::string name;
  bool holds = false;
  double margin = 0.0;  // positive iff the relation holds
};

// The exponent system derived from (d, s): q = 3^d + d + 2, alpha = 1/q,
// alpha_k = 3^k alpha, p = s - d, p1 = floor(p/3) + 1, k1 = floor(d/(3a)) + 2,
// plus the seven consistency inequalities with numeric margins.
struct AsymptoticConstants {
  int d = 0;
  double s = 0.0;
  int q_exp = 0;
  double alpha = 0.0;
  std::vector<double> alpha_k;  // alpha_k[k-1] = 3^k * alpha for k = 1..d
  double p = 0.0;
  int p1 = 0;
  int k1 = 0;
  double s0 = 0.0;
  bool smoothness_ok = true;  // false flags s < s0 (warning, not fatal)
  std::vector<InequalityCheck> inequality_report;

  double alpha_of(int k) const;            // 3^k * alpha for any k >= 1
  double eps1(double rho) const;           // rho^{-d - 2 alpha}
  double slab_radius(double rho, int k) const;  // rho^{alpha_k}
};

AsymptoticConstants asymptotic_constants(int d, double s);

struct SlabResult {
  bool inside = false;
  double margin = 0.0;  // radius - | |x|^2 - |x+b|^2 |, positive inside
};

// Membership in V_b(radius) = { x : | |x|^2 - |x+b|^2 | < radius } via the
// identity |x|^2 - |x+b|^2 = -2(x,b) - |b|^2.
SlabResult in_resonance_slab(const Quasimomentum& x, const LatticeVector& b,
                             double radius);

enum class DomainKind { NonResonant, Resonant };

struct DomainClass {
  DomainKind kind = DomainKind::NonResonant;
  int k = 0;
  std::vector<LatticeVector> directions;
  std::vector<double> slab_defects;  // | |x|^2 - |x + dir|^2 | per direction

  // k = d cannot happen on the sphere for large rho; at desk scale it is
  // reported through this flag rather than asserted away.
  bool full_resonance(int d) const { return kind == DomainKind::Resonant && k == d; }
};

struct ClassifyOptions {
  // Radius multiplier for the direction ball Gamma(mult * rho^alpha);
  // negative means the default multiplier p.
  double dir_ball_multiplier = -1.0;
  // Scale applied to every slab radius rho^{alpha_k}.
  double slab_scale = 1.0;
};

// Largest k such that x lies in k slabs V_{gamma_i}(rho^{alpha_k}) with
// linearly independent gamma_i from the direction ball; directions chosen
// greedily by ascending (|gamma|, lex).  k = 0 means x is non-resonant.
DomainClass classify(const Quasimomentum& x, double rho,
                     const AsymptoticConstants& constants,
                     const LatticeBasis& lattice,
                     const ClassifyOptions& opts = {});

// Same, against a precomputed direction ball (sorted by norm then lex); used
// by the Monte Carlo measure loop where the ball is shared across samples.
DomainClass classify_with_directions(const Quasimomentum& x, double rho,
                                     const AsymptoticConstants& constants,
                                     const std::vector<LatticeVector>& directions,
                                     const ClassifyOptions& opts = {});

// U(slab_scale * rho^{alpha_1}, p) membership only: no slab contains x.
bool is_nonresonant(const Quasimomentum& x, double rho,
                    const AsymptoticConstants& constants,
                    const std::vector<LatticeVector>& directions,
                    double slab_scale = 1.0);

}  // namespace blochasym
