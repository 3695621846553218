#include "blochasym/isoenergetic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "blochasym/parallel.hpp"
#include "blochasym/rng.hpp"

namespace blochasym {

namespace {

int effective_order(const AsymptoticConstants& constants, int cap) {
  const int c = cap > 0 ? cap : 4;
  return std::min(constants.k1, c);
}

}  // namespace

KnownPart known_part(const Quasimomentum& x, const FourierPotential& pot,
                     const AsymptoticConstants& constants, double rho,
                     int order_cap, const ExpansionOptions& opts) {
  const int k1_eff = effective_order(constants, order_cap);
  const ExpansionOptions eff = resolve_expansion_options(opts, constants, rho);
  const FSequence seq = F_sequence(x, pot, k1_eff - 1, eff);
  KnownPart kp;
  kp.value = x.squared_norm() + seq.values[k1_eff - 1];
  kp.order_used = k1_eff;
  kp.valid = seq.valid;
  kp.min_denominator = seq.min_denominator;
  return kp;
}

SimplicityVerdict simplicity_check(const Quasimomentum& x,
                                   const FourierPotential& pot,
                                   const AsymptoticConstants& constants,
                                   double rho, const SimplicityOptions& opts) {
  const LatticeBasis& lat = pot.lattice();
  SimplicityVerdict verdict;
  verdict.x = x;
  verdict.eps1 =
      opts.eps1_override > 0 ? opts.eps1_override : constants.eps1(rho);

  const DomainClass cls = classify(x, rho, constants, lat);
  if (cls.kind != DomainKind::NonResonant)
    throw Error("simplicity_check requires a non-resonant point");

  const KnownPart f_x = known_part(x, pot, constants, rho, opts.order_cap,
                                   opts.expansion);
  auto [t, gamma] = lat.reduce_to_fundamental(x);

  // K: gamma' with | F(x) - |gamma'+t|^2 | < rho^{alpha_1}/3.
  const double window = constants.slab_radius(rho, 1) / 3.0;
  const double hi = std::sqrt(std::max(f_x.value + window, 0.0));
  const auto shell = lat.ball_around(t.point, hi);

  const double lo_sq = f_x.value - window;
  const double hi_sq = f_x.value + window;
  std::vector<LatticeVector> competitors;
  for (const auto& g : shell) {
    const double e = (g.cartesian + t.point).squaredNorm();
    if (e > lo_sq && e < hi_sq) competitors.push_back(g);
  }
  verdict.K_size = competitors.size();

  const double res_window = constants.slab_radius(rho, 1);
  for (const auto& g : competitors) {
    if (g.coeffs == gamma.coeffs) continue;
    const Quasimomentum xp{g.cartesian + t.point};
    const DomainClass cp = classify(xp, rho, constants, lat);
    if (cp.kind == DomainKind::NonResonant) {
      const KnownPart f_p = known_part(xp, pot, constants, rho, opts.order_cap,
                                       opts.expansion);
      const double gap = std::abs(f_x.value - f_p.value);
      if (gap < 2.0 * verdict.eps1)
        verdict.violations.push_back({g, ClashKind::NonResClash, gap});
    } else {
      const ResonanceBlock block =
          assemble_C(xp, cp.directions, pot, constants, rho, opts.block);
      const Eigen::VectorXd lam = block_eigenvalues(block);
      double worst = std::numeric_limits<double>::infinity();
      for (int j = 0; j < lam.size(); ++j) {
        if (std::abs(lam[j] - rho * rho) >= res_window) continue;
        worst = std::min(worst, std::abs(f_x.value - lam[j]));
      }
      if (worst < 2.0 * verdict.eps1)
        verdict.violations.push_back({g, ClashKind::ResClash, worst});
    }
  }
  verdict.passed = verdict.violations.empty();
  return verdict;
}

ExclusionReport excluded_set_membership(const Quasimomentum& x,
                                        const FourierPotential& pot,
                                        const AsymptoticConstants& constants,
                                        double rho,
                                        const ExclusionOptions& opts) {
  const LatticeBasis& lat = pot.lattice();
  ExclusionReport report;
  const double eps1 = constants.eps1(rho);
  const double rho_sq = rho * rho;

  report.in_K_rho =
      std::abs(x.squared_norm() - rho_sq) < constants.slab_radius(rho, 1);

  const DomainClass cls = classify(x, rho, constants, lat);

  // P_b: x and x+b both non-resonant with |F(x) - F(x+b)| < 3 eps1.  Only b
  // with |x+b|^2 near F(x) can qualify, which prunes the scan cheaply.
  if (cls.kind == DomainKind::NonResonant) {
    const KnownPart f_x = known_part(x, pot, constants, rho, opts.order_cap,
                                     opts.expansion);
    const double scan =
        opts.pb_scan_radius > 0 ? opts.pb_scan_radius : 2.0 * rho + 3.0;
    const double window = std::max(opts.pb_prefilter, 6.0 * eps1);
    for (const auto& b : lat.ball(scan, /*exclude_zero=*/true)) {
      const Quasimomentum xb{x.point + b.cartesian};
      if (std::abs(xb.squared_norm() - f_x.value) >= window) continue;
      const DomainClass cb = classify(xb, rho, constants, lat);
      if (cb.kind != DomainKind::NonResonant) continue;
      const KnownPart f_b = known_part(xb, pot, constants, rho, opts.order_cap,
                                       opts.expansion);
      if (std::abs(f_x.value - f_b.value) < 3.0 * eps1)
        report.in_Pb.push_back(b);
    }
  }

  // A(rho): resonant shell membership with a block eigenvalue in
  // (rho^2 - 3 eps1, rho^2 + 3 eps1), intersected with K_rho.
  if (cls.kind == DomainKind::Resonant && report.in_K_rho) {
    const ResonanceBlock block =
        assemble_C(x, cls.directions, pot, constants, rho, opts.block);
    const Eigen::VectorXd lam = block_eigenvalues(block);
    for (int j = 0; j < lam.size(); ++j)
      if (std::abs(lam[j] - rho_sq) < 3.0 * eps1)
        report.in_A_rho.emplace_back(cls.k, j);
  }
  return report;
}

SurfaceWitness find_isoenergetic_point(const Quasimomentum& a, int axis,
                                       double eps, double rho,
                                       const FourierPotential& pot,
                                       const AsymptoticConstants& constants,
                                       const IsoOptions& opts) {
  const LatticeBasis& lat = pot.lattice();
  const int d = lat.dim();
  if (axis < 0 || axis >= d) throw Error("axis index out of range");
  if (eps <= 0) throw Error("bracket half-width must be positive");

  const double radius =
      opts.basis_radius > 0 ? opts.basis_radius : default_basis_radius(pot, rho);
  const double floor = opts.coeff_floor > 0 ? opts.coeff_floor : 1.0 / rho;
  const double window = 0.5 * constants.slab_radius(rho, 1);
  const double rho_sq = rho * rho;
  const double tol = opts.tol_scale * rho_sq;

  auto [t0, gamma0] = lat.reduce_to_fundamental(a);

  auto solve_at = [&](double s) {
    Eigen::VectorXd tp = t0.point;
    tp[axis] += s;
    return bloch_eigen(pot, Quasimomentum{tp}, radius);
  };

  SpectralResult res_lo = solve_at(-eps);
  auto n_lo = match_eigenvalue(res_lo, gamma0, window, floor);
  if (!n_lo) throw NoBracket("no tracked eigenvalue at the lower bracket end");
  SpectralResult res_hi = solve_at(+eps);
  auto n_hi = match_eigenvalue(res_hi, gamma0, window, floor);
  if (!n_hi) throw NoBracket("no tracked eigenvalue at the upper bracket end");

  const double lam_lo = res_lo.eigenvalue(*n_lo);
  const double lam_hi = res_hi.eigenvalue(*n_hi);
  if ((lam_lo - rho_sq) * (lam_hi - rho_sq) >= 0)
    throw NoBracket("Lambda(a - eps e_i) and Lambda(a + eps e_i) do not bracket rho^2");
  const bool increasing = lam_hi > lam_lo;

  SurfaceWitness witness;
  witness.rho = rho;
  witness.bracket_lo = Quasimomentum{a.point - eps * Eigen::VectorXd::Unit(d, axis)};
  witness.bracket_hi = Quasimomentum{a.point + eps * Eigen::VectorXd::Unit(d, axis)};

  double lo = -eps, hi = eps;
  SpectralResult prev = std::move(res_lo);
  int n_prev = *n_lo;
  for (int step = 1; step <= opts.max_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    SpectralResult res_mid = solve_at(mid);
    auto [n_mid, overlap] = track_by_overlap(prev, n_prev, res_mid);
    if (overlap < opts.min_overlap)
      throw TrackingLost("eigenvector overlap " + std::to_string(overlap) +
                         " dropped below " + std::to_string(opts.min_overlap));
    const double lam = res_mid.eigenvalue(n_mid);
    if (std::abs(lam - rho_sq) <= tol) {
      Eigen::VectorXd y = a.point;
      y[axis] += mid;
      witness.y = Quasimomentum{y};
      witness.lambda_value = lam;
      witness.residual = std::abs(lam - rho_sq);
      witness.eigen_index = n_mid;
      witness.bisection_steps = step;
      return witness;
    }
    if ((lam < rho_sq) == increasing)
      lo = mid;
    else
      hi = mid;
    prev = std::move(res_mid);
    n_prev = n_mid;
  }
  throw Error("bisection did not reach tolerance within " +
              std::to_string(opts.max_steps) + " steps");
}

MeasureEstimate measure_nonresonance_fraction(double rho,
                                              const AsymptoticConstants& constants,
                                              const LatticeBasis& lattice,
                                              double c8, std::int64_t n,
                                              std::uint64_t seed, int workers) {
  if (n < 1000) throw Error("measure estimate requires n >= 1000 samples");
  const auto directions =
      lattice.ball(constants.p * std::pow(rho, constants.alpha), true);
  const int d = lattice.dim();

  constexpr std::int64_t kBlock = 8192;
  const std::int64_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_blocks), 0);

  parallel_for(static_cast<std::size_t>(n_blocks), workers, [&](std::size_t j) {
    RandomStream stream(seed, static_cast<std::uint64_t>(j));
    const std::int64_t begin = static_cast<std::int64_t>(j) * kBlock;
    const std::int64_t end = std::min(begin + kBlock, n);
    std::int64_t hit = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      const Quasimomentum x{stream.sphere_point(d, rho)};
      if (is_nonresonant(x, rho, constants, directions, c8)) ++hit;
    }
    counts[j] = hit;
  });

  std::int64_t total = 0;
  for (auto c : counts) total += c;

  MeasureEstimate est;
  est.rho = rho;
  est.n_samples = n;
  est.fraction = static_cast<double>(total) / static_cast<double>(n);
  est.stderr_value =
      std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(n));
  est.seed = seed;
  return est;
}

double measure_fraction_grid_2d(double rho, const AsymptoticConstants& constants,
                                const LatticeBasis& lattice, double c8,
                                std::int64_t n_angles, int workers) {
  if (lattice.dim() != 2) throw Error("angular grid reference is 2-D only");
  if (n_angles < 1) throw Error("n_angles must be positive");
  const auto directions =
      lattice.ball(constants.p * std::pow(rho, constants.alpha), true);

  constexpr std::int64_t kBlock = 16384;
  const std::int64_t n_blocks = (n_angles + kBlock - 1) / kBlock;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_blocks), 0);

  parallel_for(static_cast<std::size_t>(n_blocks), workers, [&](std::size_t j) {
    const std::int64_t begin = static_cast<std::int64_t>(j) * kBlock;
    const std::int64_t end = std::min(begin + kBlock, n_angles);
    std::int64_t hit = 0;
    Eigen::VectorXd x(2);
    for (std::int64_t i = begin; i < end; ++i) {
      const double theta = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) /
                           static_cast<double>(n_angles);
      x[0] = rho * std::cos(theta);
      x[1] = rho * std::sin(theta);
      if (is_nonresonant(Quasimomentum{x}, rho, constants, directions, c8)) ++hit;
    }
    counts[j] = hit;
  });

  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return static_cast<double>(total) / static_cast<double>(n_angles);
}

namespace {

// Mean spacing of oracle eigenvalues in [rho^2 - rho, rho^2 + rho]; used to
// size the practical-mode isolation scale.
double local_level_spacing(const SpectralResult& res, double rho,
                           const AsymptoticConstants& constants) {
  const double rho_sq = rho * rho;
  const auto& ev = res.eigenvalues();
  double first = 0, last = 0;
  int count = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i] - rho_sq) > rho) continue;
    if (count == 0) first = ev[i];
    last = ev[i];
    ++count;
  }
  if (count >= 2) return (last - first) / (count - 1);
  return constants.slab_radius(rho, 1);
}

}  // namespace

CoverageResult band_coverage_witness(double rho, const FourierPotential& pot,
                                     const AsymptoticConstants& constants,
                                     int max_tries, std::uint64_t seed,
                                     const CoverageOptions& opts) {
  const LatticeBasis& lat = pot.lattice();
  const int d = lat.dim();
  const auto directions =
      lat.ball(constants.p * std::pow(rho, constants.alpha), true);
  const double rho_sq = rho * rho;
  const double radius = opts.iso.basis_radius > 0
                            ? opts.iso.basis_radius
                            : default_basis_radius(pot, rho);

  CoverageResult result;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    ++result.diagnostics.tries;
    RandomStream stream(seed, static_cast<std::uint64_t>(attempt));
    Eigen::VectorXd a = stream.sphere_point(d, rho);

    if (classify_with_directions(Quasimomentum{a}, rho, constants, directions)
            .kind != DomainKind::NonResonant) {
      ++result.diagnostics.drop_resonant;
      continue;
    }

    int axis = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(a[i]) > std::abs(a[axis])) axis = i;

    // Newton steps along the dominant axis onto the predictor surface
    // F(x) = rho^2 (dF/dx_i = 2 x_i to leading order).  Expansion failures
    // outside the asymptotic regime count as surface-stage drops.
    bool on_surface = false;
    try {
      for (int it = 0; it < 30; ++it) {
        const KnownPart kp =
            known_part(Quasimomentum{a}, pot, constants, rho, opts.order_cap);
        const double delta = rho_sq - kp.value;
        if (std::abs(delta) <= 1e-11 * rho_sq) {
          on_surface = kp.valid;
          break;
        }
        if (std::abs(a[axis]) < rho / (4.0 * d)) break;
        a[axis] += delta / (2.0 * a[axis]);
      }
    } catch (const Error&) {
      on_surface = false;
    }
    if (!on_surface ||
        classify_with_directions(Quasimomentum{a}, rho, constants, directions)
                .kind != DomainKind::NonResonant) {
      ++result.diagnostics.drop_surface;
      continue;
    }

    double eps1_used = constants.eps1(rho);
    if (opts.eps1_override > 0) {
      eps1_used = opts.eps1_override;
    } else if (opts.practical_eps) {
      const SpectralResult probe = bloch_eigen(pot, {a}, radius);
      eps1_used = 0.1 * local_level_spacing(probe, rho, constants);
    }

    SimplicityOptions sopts;
    sopts.eps1_override = eps1_used;
    sopts.order_cap = opts.order_cap;
    bool simple = false;
    try {
      simple = simplicity_check(Quasimomentum{a}, pot, constants, rho, sopts).passed;
    } catch (const Error&) {
      simple = false;
    }
    if (!simple) {
      ++result.diagnostics.drop_simplicity;
      continue;
    }

    const double eps =
        opts.eps_override > 0 ? opts.eps_override : eps1_used / (7.0 * rho);
    result.eps_used = eps;
    result.eps1_used = eps1_used;
    try {
      result.witness = find_isoenergetic_point(Quasimomentum{a}, axis, eps, rho,
                                               pot, constants, opts.iso);
      return result;
    } catch (const NoBracket&) {
      ++result.diagnostics.drop_bracket;
    } catch (const TrackingLost&) {
      ++result.diagnostics.drop_tracking;
    }
  }
  return result;
}

}  // namespace blochasym
