#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "blochasym/resonance.hpp"
#include "blochasym/rng.hpp"
#include "doctest.h"

using namespace blochasym;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

LatticeBasis square() { return make_lattice(Eigen::MatrixXd::Identity(2, 2)); }

Eigen::VectorXi ci(int a, int b) {
  Eigen::VectorXi v(2);
  v << a, b;
  return v;
}

Quasimomentum q2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return Quasimomentum{v};
}
}  // namespace

TEST_CASE("tiny radii collapse the block to the center point") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-kPi, 29.8);
  BlockOptions opts;
  opts.b_radius = 1.0;
  opts.a_radius = 1.0;
  const auto points = build_Bk_points(x, {lat.vector(ci(1, 0))}, c, 30.0, pot, opts);
  REQUIRE(points.size() == 1);
  CHECK((points[0].point - x.point).norm() < 1e-12);

  const ResonanceBlock block =
      assemble_C(x, {lat.vector(ci(1, 0))}, pot, c, 30.0, opts);
  REQUIRE(block.size() == 1);
  CHECK(block.matrix(0, 0).real() == doctest::Approx(x.squared_norm()).epsilon(1e-13));
  CHECK(block.center_index == 0);
}

TEST_CASE("five-point chain along the resonance direction") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-kPi, 29.8);
  BlockOptions opts;
  opts.b_radius = 3.0 * kTwoPi;  // strict: n in {-2..2}
  opts.a_radius = 1.0;           // only a = 0
  const auto points = build_Bk_points(x, {lat.vector(ci(1, 0))}, c, 30.0, pot, opts);
  REQUIRE(points.size() == 5);
  std::set<int> offsets;
  for (const auto& p : points) {
    const double off = (p.point - x.point)[0] / kTwoPi;
    offsets.insert(static_cast<int>(std::lround(off)));
    CHECK(std::abs((p.point - x.point)[1]) < 1e-12);
  }
  CHECK(offsets == std::set<int>{-2, -1, 0, 1, 2});

  // Matrix: diagonal |x + n g|^2, unit coupling on nearest-neighbor hops.
  const ResonanceBlock block =
      assemble_C(x, {lat.vector(ci(1, 0))}, pot, c, 30.0, opts);
  Eigen::MatrixXcd chain = Eigen::MatrixXcd::Zero(5, 5);
  for (int n = -2; n <= 2; ++n) {
    Eigen::VectorXd p = x.point;
    p[0] += n * kTwoPi;
    chain(n + 2, n + 2) = p.squaredNorm();
    if (n < 2) chain(n + 2, n + 3) = chain(n + 3, n + 2) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(chain);
  const Eigen::VectorXd lam = block_eigenvalues(block);
  for (int j = 0; j < 5; ++j)
    CHECK(lam[j] == doctest::Approx(ref.eigenvalues()[j]).epsilon(1e-12));
}

TEST_CASE("deduplication matches a naive set construction") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-kPi, 29.8);
  BlockOptions opts;
  opts.b_radius = 2.0 * kTwoPi + 0.1;
  opts.a_radius = kTwoPi + 0.1;
  const auto points = build_Bk_points(x, {lat.vector(ci(1, 0))}, c, 30.0, pot, opts);

  std::set<std::vector<int>> expected;
  for (int n = -2; n <= 2; ++n) {
    if (std::abs(n) * kTwoPi >= opts.b_radius) continue;
    for (int a1 = -1; a1 <= 1; ++a1)
      for (int a2 = -1; a2 <= 1; ++a2) {
        if (kTwoPi * std::sqrt(double(a1 * a1 + a2 * a2)) >= opts.a_radius) continue;
        expected.insert({n + a1, a2});
      }
  }
  CHECK(points.size() == expected.size());
}

TEST_CASE("zero potential: block is diagonal with eigenvalues |h_i + t|^2") {
  const auto lat = square();
  const auto pot = make_potential(lat, {});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-kPi, 29.8);
  const ResonanceBlock block = assemble_C(x, {lat.vector(ci(1, 0))}, pot, c, 30.0);
  for (int i = 0; i < block.size(); ++i)
    for (int j = 0; j < block.size(); ++j)
      if (i != j) CHECK(block.matrix(i, j) == std::complex<double>(0.0, 0.0));
  std::vector<double> diag;
  for (int i = 0; i < block.size(); ++i) diag.push_back(block.matrix(i, i).real());
  std::sort(diag.begin(), diag.end());
  const Eigen::VectorXd lam = block_eigenvalues(block);
  for (int i = 0; i < block.size(); ++i)
    CHECK(lam[i] == doctest::Approx(diag[static_cast<std::size_t>(i)]).epsilon(1e-13));

  const ResonancePrediction pred =
      resonance_predict(x, {lat.vector(ci(1, 0))}, pot, c, 30.0);
  CHECK(pred.lambda_j == doctest::Approx(x.squared_norm()).epsilon(1e-13));
}

TEST_CASE("shift invariance: adding c to the diagonal shifts every eigenvalue") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {0.5, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-kPi + 0.03, 29.8);
  ResonanceBlock block = assemble_C(x, {lat.vector(ci(1, 0))}, pot, c, 30.0);
  const Eigen::VectorXd lam = block_eigenvalues(block);
  ResonanceBlock shifted = block;
  for (int i = 0; i < shifted.size(); ++i) shifted.matrix(i, i) += 7.0;
  const Eigen::VectorXd lam_shift = block_eigenvalues(shifted);
  for (int i = 0; i < block.size(); ++i)
    CHECK(std::abs(lam_shift[i] - lam[i] - 7.0) < 1e-10 * std::max(1.0, std::abs(lam[i])));
}

TEST_CASE("block is an exact principal submatrix of the oracle matrix") {
  const auto lat = square();
  const auto pot =
      make_potential(lat, {{ci(1, 0), {0.5, 0.0}}, {ci(0, 1), {0.5, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 30.0;
  const Quasimomentum x0 = q2(-kPi + 0.05, std::sqrt(rho * rho - kPi * kPi));
  auto [t, gamma] = lat.reduce_to_fundamental(x0);
  const SpectralResult res = bloch_eigen(pot, t, default_basis_radius(pot, rho));
  const ResonanceBlock block =
      assemble_C_at(t, gamma, {lat.vector(ci(1, 0))}, pot, c, rho);
  for (int i = 0; i < block.size(); ++i) {
    const auto bi = res.basis_index(block.lattice_points[static_cast<std::size_t>(i)].coeffs);
    REQUIRE(bi.has_value());
    for (int j = 0; j < block.size(); ++j) {
      const auto bj =
          res.basis_index(block.lattice_points[static_cast<std::size_t>(j)].coeffs);
      CHECK(block.matrix(i, j) == res.hamiltonian()(*bi, *bj));
    }
  }
}

TEST_CASE("near-bisector prediction beats the naive symbol value") {
  const auto lat = square();
  const auto pot =
      make_potential(lat, {{ci(1, 0), {0.5, 0.0}}, {ci(0, 1), {0.5, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 30.0;
  const Quasimomentum x0 = q2(-kPi + 0.05, std::sqrt(rho * rho - kPi * kPi));
  auto [t, gamma] = lat.reduce_to_fundamental(x0);
  const Quasimomentum x{gamma.cartesian + t.point};
  const SpectralResult res = bloch_eigen(pot, t, default_basis_radius(pot, rho));
  const ResonancePrediction pred = resonance_predict(
      x, {lat.vector(ci(1, 0))}, pot, c, rho, &res, -1.0, 1.0 / rho);
  REQUIRE(pred.gap.has_value());
  const double naive = std::abs(*pred.oracle_lambda - x.squared_norm());
  CHECK(std::abs(*pred.gap) < naive);
}

TEST_CASE("block Lipschitz bound holds where its radius chain is valid") {
  // The enclosing inequality p1 rho^alpha < rho^{alpha_d/2}/2 needs
  // rho ~ 3e5 for (d, s) = (2, 45); check at rho = 1e6 on 20 random slab
  // pairs with |x - x'| <= 1e-3.
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {0.1, 0.0}}, {ci(0, 1), {0.1, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 1e6;
  const double bound_scale = 2.0 * std::pow(rho, 0.5 * c.alpha_of(2));
  const double slab_r = c.slab_radius(rho, 1);
  const LatticeVector b = lat.vector(ci(1, 0));
  const double b2 = b.cartesian.squaredNorm();

  RandomStream rs(99);
  for (int pair = 0; pair < 20; ++pair) {
    const double u = -0.9 + 1.8 * rs.uniform01();
    const double cb = (u * slab_r - b2) / (2.0 * b.cartesian.norm());
    const double ct = std::sqrt(rho * rho - cb * cb);
    Eigen::VectorXd xv(2);
    xv << cb, ct;
    const double angle = kTwoPi * rs.uniform01();
    const double len = 1e-3 * (0.5 + 0.5 * rs.uniform01());
    Eigen::VectorXd delta(2);
    delta << len * std::cos(angle), len * std::sin(angle);

    const ResonanceBlock ba = assemble_C(Quasimomentum{xv}, {b}, pot, c, rho);
    const ResonanceBlock bb = assemble_C(Quasimomentum{xv + delta}, {b}, pot, c, rho);
    const Eigen::VectorXd ra = block_eigenvalues(ba).array() - xv.squaredNorm();
    const Eigen::VectorXd rb =
        block_eigenvalues(bb).array() - (xv + delta).squaredNorm();
    REQUIRE(ra.size() == rb.size());
    double worst = 0.0;
    for (int j = 0; j < ra.size(); ++j)
      worst = std::max(worst, std::abs(ra[j] - rb[j]));
    CHECK(worst <= bound_scale * len);
  }
}

TEST_CASE("block cap raises BlockTooLarge") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  BlockOptions opts;
  opts.cap = 3;
  CHECK_THROWS_AS(
      assemble_C(q2(-kPi, 29.8), {lat.vector(ci(1, 0))}, pot, c, 30.0, opts),
      BlockTooLarge);
}

TEST_CASE("dependent directions are rejected") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  CHECK_THROWS_AS(assemble_C(q2(-kPi, 29.8),
                             {lat.vector(ci(1, 0)), lat.vector(ci(-2, 0))}, pot,
                             c, 30.0),
                  Error);
}
