#include "blochasym/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "blochasym/bloch_function.hpp"
#include "blochasym/decay_fit.hpp"
#include "blochasym/isoenergetic.hpp"
#include "blochasym/parallel.hpp"
#include "blochasym/rng.hpp"

namespace blochasym {

namespace {

constexpr double kPi = std::numbers::pi;

struct Fixture {
  LatticeBasis lat;
  AsymptoticConstants constants;
};

Fixture make_fixture() {
  Fixture f;
  f.lat = make_lattice(Eigen::MatrixXd::Identity(2, 2));
  f.constants = asymptotic_constants(2, 45.0);
  return f;
}

// q(x) = 2 lambda (cos((2pi,0).x) + cos((0,2pi).x)).
FourierPotential cosine_potential(const LatticeBasis& lat, double lambda) {
  Eigen::VectorXi e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  return make_potential(lat, {{e1, {lambda, 0.0}}, {e2, {lambda, 0.0}}});
}

FourierPotential free_potential(const LatticeBasis& lat) {
  return make_potential(lat, {});
}

struct TestPoint {
  Quasimomentum x;  // gamma.cartesian + t, so oracle and predictors agree
  Quasimomentum t;
  LatticeVector gamma;
};

// Rejection-samples sphere points that stay non-resonant even when every
// slab radius is widened by `margin`, keeping denominators comfortably
// iterable.
std::vector<TestPoint> sample_nonresonant(const Fixture& f, double rho, int count,
                                          std::uint64_t seed, double margin) {
  const auto dirs =
      f.lat.ball(f.constants.p * std::pow(rho, f.constants.alpha), true);
  ClassifyOptions copts;
  copts.slab_scale = margin;
  std::vector<TestPoint> out;
  for (std::uint64_t stream = 0; static_cast<int>(out.size()) < count; ++stream) {
    if (stream > 4000) throw Error("sample_nonresonant: rejection budget exhausted");
    RandomStream rs(seed, stream);
    const Quasimomentum x0{rs.sphere_point(f.lat.dim(), rho)};
    if (classify_with_directions(x0, rho, f.constants, dirs, copts).kind !=
        DomainKind::NonResonant)
      continue;
    auto [t, gamma] = f.lat.reduce_to_fundamental(x0);
    TestPoint pt;
    pt.t = t;
    pt.gamma = gamma;
    pt.x = Quasimomentum{gamma.cartesian + t.point};
    out.push_back(std::move(pt));
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// Independent oracles used only for cross-checks in this suite.

// Brute-force S_k by literal nested loops (k = 1, 2, 3).
std::complex<double> brute_force_S(double a, const Eigen::VectorXd& x,
                                   const FourierPotential& pot, int k) {
  const auto& modes = pot.support();
  std::complex<double> sum{0.0, 0.0};
  if (k == 1) {
    for (const auto& m1 : modes) {
      if (m1.coeffs.isZero()) continue;
      const std::complex<double> tail = pot.coefficient(-m1.coeffs);
      if (tail == std::complex<double>(0.0, 0.0)) continue;
      sum += m1.value * tail / (a - (x - m1.cartesian).squaredNorm());
    }
    return sum;
  }
  if (k == 2) {
    for (const auto& m1 : modes)
      for (const auto& m2 : modes) {
        const Eigen::VectorXi s1 = m1.coeffs;
        const Eigen::VectorXi s2 = m1.coeffs + m2.coeffs;
        if (s1.isZero() || s2.isZero()) continue;
        const std::complex<double> tail = pot.coefficient(-s2);
        if (tail == std::complex<double>(0.0, 0.0)) continue;
        const double d1 = a - (x - m1.cartesian).squaredNorm();
        const double d2 = a - (x - m1.cartesian - m2.cartesian).squaredNorm();
        sum += m1.value * m2.value * tail / (d1 * d2);
      }
    return sum;
  }
  if (k == 3) {
    for (const auto& m1 : modes)
      for (const auto& m2 : modes)
        for (const auto& m3 : modes) {
          const Eigen::VectorXi s1 = m1.coeffs;
          const Eigen::VectorXi s2 = m1.coeffs + m2.coeffs;
          const Eigen::VectorXi s3 = s2 + m3.coeffs;
          if (s1.isZero() || s2.isZero() || s3.isZero()) continue;
          const std::complex<double> tail = pot.coefficient(-s3);
          if (tail == std::complex<double>(0.0, 0.0)) continue;
          const Eigen::VectorXd c1 = x - m1.cartesian;
          const Eigen::VectorXd c2 = c1 - m2.cartesian;
          const Eigen::VectorXd c3 = c2 - m3.cartesian;
          const double d1 = a - c1.squaredNorm();
          const double d2 = a - c2.squaredNorm();
          const double d3 = a - c3.squaredNorm();
          sum += m1.value * m2.value * m3.value * tail / (d1 * d2 * d3);
        }
    return sum;
  }
  throw Error("brute_force_S supports k <= 3");
}

// Textbook second-order Rayleigh-Schrodinger sum for the state at x.
double rayleigh_schrodinger_2(const Eigen::VectorXd& x, const FourierPotential& pot) {
  double sum = 0.0;
  for (const auto& b : pot.support()) {
    sum += std::norm(b.value) /
           (x.squaredNorm() - (x - b.cartesian).squaredNorm());
  }
  return sum;
}

double normalized_gram_det(const std::vector<const LatticeVector*>& vs) {
  const int k = static_cast<int>(vs.size());
  Eigen::MatrixXd g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      g(i, j) = vs[static_cast<std::size_t>(i)]->cartesian.normalized().dot(
          vs[static_cast<std::size_t>(j)]->cartesian.normalized());
  return std::abs(g.determinant());
}

bool has_independent_subset(const std::vector<const LatticeVector*>& cand, int k) {
  std::vector<const LatticeVector*> chosen;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (static_cast<int>(chosen.size()) == k)
      return normalized_gram_det(chosen) > 1e-10;
    for (std::size_t i = start; i < cand.size(); ++i) {
      chosen.push_back(cand[i]);
      if (rec(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return rec(0);
}

// Exhaustive slab enumeration: non-resonant iff no slab of radius
// rho^{alpha_1} contains x, else the largest k admitting k linearly
// independent in-slab directions at radius rho^{alpha_k}.
int exhaustive_classify_k(const Quasimomentum& x, double rho,
                          const AsymptoticConstants& c,
                          const std::vector<LatticeVector>& dirs) {
  bool in_e1 = false;
  for (const auto& b : dirs)
    if (in_resonance_slab(x, b, c.slab_radius(rho, 1)).inside) {
      in_e1 = true;
      break;
    }
  if (!in_e1) return 0;
  int best = 1;
  for (int k = 2; k <= c.d; ++k) {
    const double radius = c.slab_radius(rho, k);
    std::vector<const LatticeVector*> cand;
    for (const auto& b : dirs)
      if (in_resonance_slab(x, b, radius).inside) cand.push_back(&b);
    if (static_cast<int>(cand.size()) >= k && has_independent_subset(cand, k))
      best = k;
  }
  return best;
}

// ---------------------------------------------------------------------------

struct Check {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!ok) detail << "[FAIL " << what << "] ";
  }
  void note(const std::string& what) { detail << what << "; "; }
};

Check criterion_1_oracle_exactness(const Fixture& f, int /*threads*/) {
  Check c;
  const auto pot = free_potential(f.lat);
  Eigen::VectorXd tv(2);
  tv << 0.37, 0.59;
  const Quasimomentum t{tv};
  const double rho = 20.0;
  const SpectralResult res = bloch_eigen(pot, t, default_basis_radius(pot, rho));

  std::vector<double> expected;
  for (const auto& g : res.basis())
    expected.push_back((g.cartesian + t.point).squaredNorm());
  std::sort(expected.begin(), expected.end());

  double worst = 0.0;
  for (int n = 0; n < res.size(); ++n) {
    const double e = expected[static_cast<std::size_t>(n)];
    worst = std::max(worst, std::abs(res.eigenvalue(n) - e) / std::max(1.0, e));
  }
  c.require(worst <= 1e-12, "eigenvalues vs sorted |gamma+t|^2");
  c.note("max rel err " + fmt(worst) + " over " + std::to_string(res.size()) +
         " levels");

  bool coordinate = true;
  for (int n = 0; n < res.size() && coordinate; ++n) {
    int nonzero = 0;
    for (int i = 0; i < res.size(); ++i) {
      const double a = std::abs(res.vectors()(i, n));
      if (a > 0.0) {
        ++nonzero;
        if (std::abs(a - 1.0) > 0.0) coordinate = false;
      }
    }
    if (nonzero != 1) coordinate = false;
  }
  c.require(coordinate, "eigenvectors are coordinate vectors");
  return c;
}

Check criterion_2_parseval_residual(const Fixture& f, int threads) {
  Check c;
  struct Case {
    double lambda, rho, t1, t2;
  };
  const std::vector<Case> cases = {{0.1, 20, 0.37, 0.59}, {0.1, 40, 0.11, -0.23},
                                   {0.5, 20, 0.41, 0.13}, {0.5, 40, 0.37, 0.59}};
  std::vector<double> parseval(cases.size()), residual(cases.size());
  parallel_for(cases.size(), threads, [&](std::size_t i) {
    const auto pot = cosine_potential(f.lat, cases[i].lambda);
    Eigen::VectorXd tv(2);
    tv << cases[i].t1, cases[i].t2;
    const SpectralResult res =
        bloch_eigen(pot, Quasimomentum{tv}, default_basis_radius(pot, cases[i].rho));
    parseval[i] = res.max_parseval_defect();
    residual[i] = res.max_scaled_residual();
  });
  const double wp = *std::max_element(parseval.begin(), parseval.end());
  const double wr = *std::max_element(residual.begin(), residual.end());
  c.require(wp <= 1e-10, "Parseval within 1e-10");
  c.require(wr <= 1e-8, "residual within 1e-8 * max(1, |Lambda|)");
  c.note("worst Parseval defect " + fmt(wp) + ", worst scaled residual " + fmt(wr));
  return c;
}

Check criterion_3_nonresonance_decay(const Fixture& f, int threads) {
  Check c;
  const double lambda = 0.1;
  const std::vector<double> rhos = {20, 40, 80};
  const int points_per_rho = 5;

  std::vector<std::vector<double>> res_k1(rhos.size()), res_k2(rhos.size());
  parallel_for(rhos.size(), threads, [&](std::size_t ri) {
    const double rho = rhos[ri];
    const auto pot = cosine_potential(f.lat, lambda);
    const auto pts =
        sample_nonresonant(f, rho, points_per_rho, 301 + static_cast<std::uint64_t>(ri), 1.3);
    for (const auto& pt : pts) {
      const SpectralResult oracle =
          bloch_eigen(pot, pt.t, default_basis_radius(pot, rho));
      const ExpansionReport rep = predict_eigenvalue(
          pt.x, pot, 2, f.constants, rho, {}, &oracle, 1.0 / rho);
      if (!rep.oracle_lambda) continue;
      res_k1[ri].push_back(std::abs(*rep.orders[0].oracle_gap));
      res_k2[ri].push_back(std::abs(*rep.orders[1].oracle_gap));
    }
  });

  std::vector<std::pair<double, double>> p1, p2;
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    c.require(!res_k1[ri].empty(), "oracle match at rho " + fmt(rhos[ri]));
    if (res_k1[ri].empty()) return c;
    p1.emplace_back(rhos[ri], median(res_k1[ri]));
    p2.emplace_back(rhos[ri], median(res_k2[ri]));
  }
  const double alpha = f.constants.alpha;
  const DecayFit f1 = fit_decay("nonres k=1 residual", p1, 3.0 * alpha);
  const DecayFit f2 = fit_decay("nonres k=2 residual", p2, 6.0 * alpha);
  c.require(f1.pass, "k=1 slope " + fmt(f1.slope) + " <= " + fmt(-3.0 * alpha * 0.8));
  c.require(f2.pass, "k=2 slope " + fmt(f2.slope) + " <= " + fmt(-6.0 * alpha * 0.8));
  c.note("slopes k1 " + fmt(f1.slope) + ", k2 " + fmt(f2.slope));

  // Brute-force S_k cross-check, k <= 3, at one sampled point.
  const double rho = 30.0;
  const auto pot = cosine_potential(f.lat, lambda);
  const auto pt = sample_nonresonant(f, rho, 1, 307, 1.3).front();
  const double a = pt.x.squared_norm();
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const SumResult sk = S_k(a, pt.x, pot, k);
    const std::complex<double> bf = brute_force_S(a, pt.x.point, pot, k);
    worst = std::max(worst, std::abs(sk.value - bf) / std::max(1.0, std::abs(bf)));
  }
  c.require(worst <= 1e-12, "brute-force S_k cross-check");
  c.note("S_k brute-force max err " + fmt(worst));
  return c;
}

Check criterion_4_second_order(const Fixture& f, int threads) {
  Check c;
  const double rho = 30.0;
  const std::vector<double> lambdas = {0.05, 0.1, 0.2};
  const auto pt = sample_nonresonant(f, rho, 1, 401, 1.3).front();

  std::vector<double> residuals(lambdas.size());
  double worst_identity = 0.0;
  parallel_for(lambdas.size(), threads, [&](std::size_t li) {
    const auto pot = cosine_potential(f.lat, lambdas[li]);
    const SpectralResult oracle = bloch_eigen(pot, pt.t, default_basis_radius(pot, rho));
    auto n = match_eigenvalue(oracle, pt.gamma, 0.5 * f.constants.slab_radius(rho, 1),
                              1.0 / rho);
    if (!n) throw NoOracleMatch("criterion 4: no oracle match");
    // Independent textbook prediction.
    const double rs2 = rayleigh_schrodinger_2(pt.x.point, pot);
    residuals[li] = std::abs(oracle.eigenvalue(*n) - (pt.x.squared_norm() + rs2));
    // F_1 must equal the same sum exactly.
    const FSequence seq = F_sequence(pt.x, pot, 1);
    worst_identity = std::max(
        worst_identity, std::abs(seq.values[1] - rs2) / std::max(1.0, std::abs(rs2)));
  });

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    lx.push_back(std::log(lambdas[i]));
    ly.push_back(std::log(residuals[i]));
  }
  const auto [slope, se] = ols_slope(lx, ly);
  c.require(slope >= 2.7, "residual-vs-lambda slope " + fmt(slope) + " >= 2.7");
  c.require(worst_identity <= 1e-12, "F_1 equals the independent RS2 sum");
  c.note("lambda slope " + fmt(slope) + " +- " + fmt(se) + ", identity err " +
         fmt(worst_identity));
  return c;
}

Check criterion_5_resonance_block(const Fixture& f, int /*threads*/) {
  Check c;
  const double rho = 30.0;
  // Bisector-adjacent point for b = (2pi, 0).
  Eigen::VectorXd xv(2);
  xv[0] = -kPi + 0.05;
  xv[1] = std::sqrt(rho * rho - xv[0] * xv[0]);
  const Quasimomentum x0{xv};

  for (double lambda : {0.1, 0.5}) {
    const auto pot = cosine_potential(f.lat, lambda);
    const DomainClass dc = classify(x0, rho, f.constants, f.lat);
    bool has_b = false;
    for (const auto& dir : dc.directions)
      has_b = has_b || (dir.coeffs[0] == 1 && dir.coeffs[1] == 0);
    c.require(dc.kind == DomainKind::Resonant && has_b,
              "bisector point resonant with direction (2pi,0) at lambda " +
                  fmt(lambda));
    if (dc.kind != DomainKind::Resonant) continue;

    auto [t, gamma] = f.lat.reduce_to_fundamental(x0);
    const Quasimomentum x{gamma.cartesian + t.point};
    const SpectralResult oracle = bloch_eigen(pot, t, default_basis_radius(pot, rho));
    const ResonanceBlock block =
        assemble_C_at(t, gamma, dc.directions, pot, f.constants, rho);

    // Hermiticity to 1e-14 (bit-exact by construction).
    double herm = 0.0;
    for (int i = 0; i < block.size(); ++i)
      for (int j = 0; j < block.size(); ++j)
        herm = std::max(herm,
                        std::abs(block.matrix(i, j) - std::conj(block.matrix(j, i))));
    c.require(herm <= 1e-14, "block Hermitian");

    // Exact principal submatrix of the oracle matrix.
    bool exact = true;
    std::vector<int> map_idx(static_cast<std::size_t>(block.size()));
    for (int i = 0; i < block.size(); ++i) {
      auto idx = oracle.basis_index(block.lattice_points[static_cast<std::size_t>(i)].coeffs);
      if (!idx) {
        exact = false;
        break;
      }
      map_idx[static_cast<std::size_t>(i)] = *idx;
    }
    if (exact)
      for (int i = 0; i < block.size() && exact; ++i)
        for (int j = 0; j < block.size() && exact; ++j)
          exact = block.matrix(i, j) ==
                  oracle.hamiltonian()(map_idx[static_cast<std::size_t>(i)],
                                       map_idx[static_cast<std::size_t>(j)]);
    c.require(exact, "block equals oracle principal submatrix exactly");

    const ResonancePrediction pred = resonance_predict(
        x, dc.directions, pot, f.constants, rho, &oracle, -1.0, 1.0 / rho);
    const double naive = std::abs(*pred.oracle_lambda - x.squared_norm());
    c.require(std::abs(*pred.gap) < naive,
              "resonance beats naive at lambda " + fmt(lambda));
    c.note("lambda " + fmt(lambda) + ": |gap| " + fmt(std::abs(*pred.gap)) +
           " vs naive " + fmt(naive) + ", b_k " + std::to_string(pred.block_size));
  }
  return c;
}

// 20 random same-slab pairs at rho = 40 with |x - x'| <= 1e-3, checked
// against |r_j(x) - r_j(x')| <= 2 rho^{alpha_d/2} |x - x'| for every j.
// The fattened block reaches offsets of norm p1 rho^alpha ~ 19.9 at this
// rho while the bound envelope is rho^{alpha_d/2} ~ 3.59, so the desk-scale
// pin is expected to fail; the same check is run at rho = 1e6 (where the
// enclosing inequality p1 rho^alpha < rho^{alpha_d/2}/2 first holds) as a
// diagnostic of the asymptotic claim itself.
std::pair<int, double> lipschitz_pairs(const Fixture& f, double rho, int n_pairs,
                                       double lambda, std::uint64_t seed,
                                       int threads) {
  const auto pot = cosine_potential(f.lat, lambda);
  const double bound_scale = 2.0 * std::pow(rho, 0.5 * f.constants.alpha_of(2));
  const double slab_r = f.constants.slab_radius(rho, 1);

  std::vector<double> ratios(static_cast<std::size_t>(n_pairs));
  parallel_for(static_cast<std::size_t>(n_pairs), threads, [&](std::size_t i) {
    RandomStream rs(seed, i);
    Eigen::VectorXi bc(2);
    const int which = static_cast<int>(i % 2);
    bc << (which == 0 ? 1 : 0), (which == 0 ? 0 : 1);
    const LatticeVector b = f.lat.vector(bc);
    const double b2 = b.cartesian.squaredNorm();

    // Place x on the sphere inside the slab of b: 2(x,b) + |b|^2 = u * slab_r.
    const double u = -0.9 + 1.8 * rs.uniform01();
    const double cb = (u * slab_r - b2) / (2.0 * b.cartesian.norm());
    const double ct = std::sqrt(rho * rho - cb * cb) * (rs.uniform01() < 0.5 ? -1 : 1);
    Eigen::VectorXd bhat = b.cartesian.normalized();
    Eigen::VectorXd that(2);
    that << -bhat[1], bhat[0];
    Eigen::VectorXd xv = cb * bhat + ct * that;

    const double angle = 2.0 * kPi * rs.uniform01();
    const double len = 1e-3 * (0.5 + 0.5 * rs.uniform01());
    Eigen::VectorXd delta(2);
    delta << len * std::cos(angle), len * std::sin(angle);

    const Quasimomentum xa{xv}, xb{xv + delta};
    const std::vector<LatticeVector> dirs = {b};
    const ResonanceBlock block_a = assemble_C(xa, dirs, pot, f.constants, rho);
    const ResonanceBlock block_b = assemble_C(xb, dirs, pot, f.constants, rho);
    const Eigen::VectorXd ra =
        block_eigenvalues(block_a).array() - xa.squared_norm();
    const Eigen::VectorXd rb =
        block_eigenvalues(block_b).array() - xb.squared_norm();
    const int m = std::min<int>(ra.size(), rb.size());
    double worst = 0.0;
    for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(ra[j] - rb[j]));
    ratios[i] = worst / (bound_scale * len);
  });

  int failures = 0;
  double worst = 0.0;
  for (double r : ratios) {
    if (r > 1.0) ++failures;
    worst = std::max(worst, r);
  }
  return {failures, worst};
}

Check criterion_6_lipschitz(const Fixture& f, int threads) {
  Check c;
  const auto [failures, worst] = lipschitz_pairs(f, 40.0, 20, 0.1, 601, threads);
  c.require(failures == 0, "Lipschitz bound on 20 slab pairs at rho=40");
  c.note("rho=40: " + std::to_string(failures) + "/20 pairs exceed, worst ratio " +
         fmt(worst) + " (fattened offsets reach p1*rho^alpha ~ " +
         fmt(f.constants.p1 * std::pow(40.0, f.constants.alpha)) +
         " vs envelope rho^{alpha_d/2} ~ " +
         fmt(std::pow(40.0, 0.5 * f.constants.alpha_of(2))) + ")");
  const auto [failures_big, worst_big] = lipschitz_pairs(f, 1e6, 5, 0.1, 603, threads);
  c.note("diagnostic rho=1e6: " + std::to_string(failures_big) +
         "/5 pairs exceed, worst ratio " + fmt(worst_big));
  return c;
}

Check criterion_7_bloch_tail(const Fixture& f, int threads) {
  Check c;
  const double lambda = 0.1;
  const std::vector<double> rhos = {20, 40, 80};

  std::vector<std::vector<double>> tails(rhos.size());
  std::vector<double> l2err(rhos.size(), 0.0);
  parallel_for(rhos.size(), threads, [&](std::size_t ri) {
    const double rho = rhos[ri];
    const auto pot = cosine_potential(f.lat, lambda);
    const auto candidates =
        sample_nonresonant(f, rho, 6, 701 + static_cast<std::uint64_t>(ri), 1.3);
    int accepted = 0;
    for (const auto& pt : candidates) {
      if (accepted == 3) break;
      if (!simplicity_check(pt.x, pot, f.constants, rho).passed) continue;
      const SpectralResult oracle =
          bloch_eigen(pot, pt.t, default_basis_radius(pot, rho));
      auto n = match_eigenvalue(oracle, pt.gamma,
                                0.5 * f.constants.slab_radius(rho, 1), 1.0 / rho);
      if (!n) continue;
      ++accepted;
      tails[ri].push_back(tail_mass(oracle, *n, pt.gamma));

      if (accepted == 1) {
        // Phi_1-level coefficient comparison at order n = 2.
        const BlochPrediction pred =
            predict_coefficients(pt.x, pot, 2, f.constants, rho);
        const Eigen::VectorXcd fixed = gauge_fixed_vector(oracle, *n, pt.gamma);
        double err_sq = 0.0;
        const auto center_idx = oracle.basis_index(pt.gamma.coeffs);
        err_sq += std::norm(fixed[*center_idx] -
                            std::complex<double>(pred.b_center, 0.0));
        for (const auto& off : pred.offsets) {
          std::complex<double> ob{0.0, 0.0};
          if (auto idx = oracle.basis_index(pt.gamma.coeffs + off.gamma_prime.coeffs))
            ob = fixed[*idx];
          err_sq += std::norm(ob - off.value);
        }
        l2err[ri] = std::sqrt(err_sq);
      }
    }
  });

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    c.require(!tails[ri].empty(), "accepted points at rho " + fmt(rhos[ri]));
    if (tails[ri].empty()) return c;
    pairs.emplace_back(rhos[ri], median(tails[ri]));
  }
  const double target = 2.0 * f.constants.alpha_of(1);
  const DecayFit fit = fit_decay("tail mass", pairs, target);
  c.require(fit.pass, "tail slope " + fmt(fit.slope) + " <= " + fmt(-target * 0.8));
  c.require(l2err.back() < l2err.front(),
            "coefficient l2 error decays (" + fmt(l2err.front()) + " -> " +
                fmt(l2err.back()) + ")");
  c.note("tail slope " + fmt(fit.slope) + ", l2 errors " + fmt(l2err[0]) + "/" +
         fmt(l2err[1]) + "/" + fmt(l2err[2]));
  return c;
}

Check criterion_8_gradient(const Fixture& f, int threads) {
  Check c;
  const double lambda = 0.1;
  const std::vector<double> rhos = {20, 40, 80};
  const double h_fit = 1e-3;

  std::vector<double> errs(rhos.size(), -1.0);
  parallel_for(rhos.size(), threads, [&](std::size_t ri) {
    const double rho = rhos[ri];
    const auto pot = cosine_potential(f.lat, lambda);
    const double radius = default_basis_radius(pot, rho);
    const auto candidates =
        sample_nonresonant(f, rho, 12, 801 + static_cast<std::uint64_t>(ri), 1.5);
    for (const auto& pt : candidates) {
      const SpectralResult res = bloch_eigen(pot, pt.t, radius);
      auto n = match_eigenvalue(res, pt.gamma, 0.5 * f.constants.slab_radius(rho, 1),
                                1.0 / rho);
      if (!n) continue;
      const double needed = 10.0 * h_fit * (2.0 * pt.t.norm() + 2.0 * radius) * 1.05;
      const double glo = *n > 0 ? res.eigenvalue(*n) - res.eigenvalue(*n - 1) : 1e30;
      const double ghi =
          *n + 1 < res.size() ? res.eigenvalue(*n + 1) - res.eigenvalue(*n) : 1e30;
      if (std::min(glo, ghi) <= needed) continue;
      const Eigen::VectorXd grad =
          eigenvalue_gradient_fd(pot, pt.t, radius, *n, h_fit);
      errs[ri] = (grad - 2.0 * pt.x.point).norm();
      break;
    }
  });

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    c.require(errs[ri] > 0, "isolated eigenvalue found at rho " + fmt(rhos[ri]));
    if (errs[ri] <= 0) return c;
    pairs.emplace_back(rhos[ri], errs[ri]);
  }
  // Envelope O(rho^{1 - 2 alpha_1}): target exponent 2 alpha_1 - 1 < 0.
  const double target = 2.0 * f.constants.alpha_of(1) - 1.0;
  const DecayFit fit = fit_decay("gradient error", pairs, target);
  c.require(fit.pass, "gradient slope " + fmt(fit.slope) + " <= " + fmt(-target * 0.8));
  c.note("|FD - 2x| = " + fmt(pairs[0].second) + "/" + fmt(pairs[1].second) + "/" +
         fmt(pairs[2].second) + ", slope " + fmt(fit.slope));

  // Richardson: |FD(h) - FD(h/2)| / |FD(h/2) - FD(h/4)| ~ 4 at a point with
  // appreciable curvature (near-slab, strong coupling).
  {
    const double rho = 20.0;
    const auto pot = cosine_potential(f.lat, 0.5);
    const double radius = default_basis_radius(pot, rho);
    Eigen::VectorXi bc(2);
    bc << 1, 0;
    const LatticeVector b = f.lat.vector(bc);
    const double b2 = b.cartesian.squaredNorm();

    bool done = false;
    for (double defect : {3.0, -3.0, 3.5, -3.5, 4.5, -4.5, 5.5, -5.5, 7.0, -7.0,
                          8.5, -8.5, 10.0, -10.0, 12.0, -12.0, 15.0, -15.0}) {
      for (double sign : {1.0, -1.0}) {
        const double cb = (defect - b2) / (2.0 * b.cartesian.norm());
        const double ct = sign * std::sqrt(rho * rho - cb * cb);
        Eigen::VectorXd xv(2);
        xv << cb, ct;
        const Quasimomentum x0{xv};
        if (classify(x0, rho, f.constants, f.lat).kind != DomainKind::NonResonant)
          continue;
        auto [t, gamma] = f.lat.reduce_to_fundamental(x0);
        const SpectralResult res = bloch_eigen(pot, t, radius);
        auto n = match_eigenvalue(res, gamma, 0.5 * f.constants.slab_radius(rho, 1),
                                  1.0 / rho);
        if (!n) continue;
        const double h0 = 5e-3;
        const double needed = 10.0 * h0 * (2.0 * t.norm() + 2.0 * radius) * 1.05;
        const double glo = *n > 0 ? res.eigenvalue(*n) - res.eigenvalue(*n - 1) : 1e30;
        const double ghi =
            *n + 1 < res.size() ? res.eigenvalue(*n + 1) - res.eigenvalue(*n) : 1e30;
        if (std::min(glo, ghi) <= needed) continue;

        const Eigen::VectorXd g1 = eigenvalue_gradient_fd(pot, t, radius, *n, h0);
        const Eigen::VectorXd g2 = eigenvalue_gradient_fd(pot, t, radius, *n, h0 / 2);
        const Eigen::VectorXd g4 = eigenvalue_gradient_fd(pot, t, radius, *n, h0 / 4);
        const double d12 = (g1 - g2).norm();
        const double d24 = (g2 - g4).norm();
        if (d24 == 0.0) continue;
        const double ratio = d12 / d24;
        c.require(ratio > 2.5 && ratio < 6.5,
                  "Richardson ratio " + fmt(ratio) + " consistent with O(h^2)");
        c.note("Richardson ratio " + fmt(ratio));
        done = true;
        break;
      }
      if (done) break;
    }
    c.require(done, "Richardson test point found");
  }
  return c;
}

Check criterion_9_measure(const Fixture& f, int threads) {
  Check c;
  const std::vector<double> rhos = {25, 50, 100};
  std::vector<MeasureEstimate> mc(rhos.size());
  std::vector<double> grid(rhos.size());
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    mc[i] = measure_nonresonance_fraction(rhos[i], f.constants, f.lat, 1.0, 100000,
                                          901, threads);
    grid[i] = measure_fraction_grid_2d(rhos[i], f.constants, f.lat, 1.0, 1000000,
                                       threads);
    const double dev = std::abs(mc[i].fraction - grid[i]);
    c.require(dev <= 3.0 * mc[i].stderr_value,
              "MC within 3 stderr of grid at rho " + fmt(rhos[i]));
    c.note("rho " + fmt(rhos[i]) + ": mc " + fmt(mc[i].fraction) + " grid " +
           fmt(grid[i]) + " (dev/se " + fmt(dev / mc[i].stderr_value) + ")");
  }
  for (std::size_t i = 0; i + 1 < rhos.size(); ++i) {
    const double combined = std::sqrt(mc[i].stderr_value * mc[i].stderr_value +
                                      mc[i + 1].stderr_value * mc[i + 1].stderr_value);
    c.require(mc[i + 1].fraction >= mc[i].fraction - 2.0 * combined,
              "fraction nondecreasing " + fmt(rhos[i]) + " -> " + fmt(rhos[i + 1]));
  }
  return c;
}

Check criterion_10_witness(const Fixture& f, int /*threads*/) {
  Check c;
  const double rho = 30.0;
  const auto pot = cosine_potential(f.lat, 0.1);
  CoverageOptions opts;
  opts.iso.tol_scale = 1e-9;
  opts.iso.max_steps = 60;
  const CoverageResult r = band_coverage_witness(rho, pot, f.constants, 50, 1001, opts);
  c.require(r.witness.has_value(),
            "witness found within 50 tries (used " +
                std::to_string(r.diagnostics.tries) + ")");
  if (r.witness) {
    c.require(r.witness->residual <= 1e-9 * rho * rho,
              "residual " + fmt(r.witness->residual) + " <= 1e-9 rho^2");
    c.require(r.witness->bisection_steps <= 60,
              "bisection steps " + std::to_string(r.witness->bisection_steps));
    c.note("tries " + std::to_string(r.diagnostics.tries) + ", steps " +
           std::to_string(r.witness->bisection_steps) + ", residual " +
           fmt(r.witness->residual));
  }
  return c;
}

Check criterion_11_classification(const Fixture& f, int threads) {
  Check c;
  const double rho = 30.0;
  const auto dirs = f.lat.ball(f.constants.p * std::pow(rho, f.constants.alpha), true);

  // 1000 points: generic sphere samples plus constructed near-bisector ones.
  std::vector<Quasimomentum> points;
  {
    RandomStream rs(1101, 0);
    for (int i = 0; i < 600; ++i) points.push_back(Quasimomentum{rs.sphere_point(2, rho)});
    RandomStream rs2(1101, 1);
    for (int i = 0; i < 400; ++i) {
      const auto& b = dirs[static_cast<std::size_t>(i) % 8];
      const double b2 = b.cartesian.squaredNorm();
      const double u = (-1.2 + 2.4 * rs2.uniform01()) *
                       f.constants.slab_radius(rho, 2);
      const double cb = (u - b2) / (2.0 * b.cartesian.norm());
      if (std::abs(cb) >= rho) continue;
      const double ct =
          std::sqrt(rho * rho - cb * cb) * (rs2.uniform01() < 0.5 ? -1 : 1);
      Eigen::VectorXd bhat = b.cartesian.normalized();
      Eigen::VectorXd that(2);
      that << -bhat[1], bhat[0];
      points.push_back(Quasimomentum{cb * bhat + ct * that});
    }
  }

  std::vector<int> mismatch(points.size(), 0);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const DomainClass dc = classify_with_directions(points[i], rho, f.constants, dirs);
    const int k_impl = dc.kind == DomainKind::NonResonant ? 0 : dc.k;
    const int k_oracle = exhaustive_classify_k(points[i], rho, f.constants, dirs);
    mismatch[i] = k_impl == k_oracle ? 0 : 1;
  });
  int bad = 0;
  for (int m : mismatch) bad += m;
  c.require(bad == 0, "classify matches exhaustive enumeration on all points");
  c.note(std::to_string(points.size()) + " points, " + std::to_string(bad) +
         " mismatches");

  // Simplicity at q = 0 against the sort-and-scan distinctness oracle.
  const auto pot0 = free_potential(f.lat);
  int checked = 0, disagreements = 0, oracle_fail_count = 0;
  RandomStream rs(1103, 0);
  for (int i = 0; i < 220 && checked < 200; ++i) {
    Quasimomentum x{rs.sphere_point(2, rho)};
    if (i >= 180) {
      // Mirror-symmetric construction: exact degeneracy partners.
      auto [t, gamma] = f.lat.reduce_to_fundamental(x);
      Eigen::VectorXd tv = t.point;
      tv[0] = 0.0;
      Eigen::VectorXi gc = gamma.coeffs;
      if (gc[0] == 0) gc[0] = 3;
      x = Quasimomentum{f.lat.vector(gc).cartesian + tv};
    }
    if (classify_with_directions(x, rho, f.constants, dirs).kind !=
        DomainKind::NonResonant)
      continue;
    ++checked;
    const SimplicityVerdict v = simplicity_check(x, pot0, f.constants, rho);

    auto [t, gamma] = f.lat.reduce_to_fundamental(x);
    const double F = x.squared_norm();
    const double w = f.constants.slab_radius(rho, 1) / 3.0;
    bool oracle_pass = true;
    for (const auto& g : f.lat.ball_around(t.point, std::sqrt(F + w))) {
      if (g.coeffs == gamma.coeffs) continue;
      const double e = (g.cartesian + t.point).squaredNorm();
      if (std::abs(e - F) >= w) continue;
      if (std::abs(e - F) < 2.0 * v.eps1) oracle_pass = false;
    }
    if (!oracle_pass) ++oracle_fail_count;
    if (v.passed != oracle_pass) ++disagreements;
  }
  c.require(disagreements == 0, "simplicity matches the sort-and-scan oracle");
  c.note(std::to_string(checked) + " simplicity points, " +
         std::to_string(oracle_fail_count) + " oracle-failing, " +
         std::to_string(disagreements) + " disagreements");
  return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  const Fixture fixture = make_fixture();
  struct Entry {
    int id;
    const char* name;
    std::function<Check(const Fixture&, int)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "oracle exactness (q=0)", criterion_1_oracle_exactness},
      {2, "Parseval and residual", criterion_2_parseval_residual},
      {3, "non-resonance decay", criterion_3_nonresonance_decay},
      {4, "second-order perturbation equivalence", criterion_4_second_order},
      {5, "resonance block", criterion_5_resonance_block},
      {6, "block Lipschitz bound", criterion_6_lipschitz},
      {7, "Bloch tail and coefficients", criterion_7_bloch_tail},
      {8, "gradient formula", criterion_8_gradient},
      {9, "measure asymptotics", criterion_9_measure},
      {10, "isoenergetic witness", criterion_10_witness},
      {11, "classification soundness", criterion_11_classification},
  };

  std::vector<CriterionResult> results;
  for (const auto& entry : entries) {
    if (!opts.only.empty() &&
        std::find(opts.only.begin(), opts.only.end(), entry.id) == opts.only.end())
      continue;
    CriterionResult r;
    r.id = entry.id;
    r.name = entry.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      Check ck = entry.fn(fixture, opts.threads);
      r.passed = ck.passed;
      r.detail = ck.detail.str();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    if (opts.log)
      (*opts.log) << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": "
                  << r.name << " (" << fmt(r.seconds) << "s) " << r.detail << "\n";
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace blochasym
