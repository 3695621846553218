#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "blochasym/lattice.hpp"
#include "blochasym/rng.hpp"
#include "doctest.h"

using namespace blochasym;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXd identity2() { return Eigen::MatrixXd::Identity(2, 2); }

std::vector<int> key(const LatticeVector& v) {
  return {v.coeffs[0], v.coeffs[1]};
}
}  // namespace

TEST_CASE("identity lattice: Z^2 with dual 2 pi Z^2") {
  const LatticeBasis lat = make_lattice(identity2());
  CHECK(lat.dim() == 2);
  CHECK(lat.cell_volume() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lat.basis()(0, 0) == doctest::Approx(1.0));
  CHECK(lat.dual_basis()(0, 0) == doctest::Approx(kTwoPi));
  CHECK(lat.dual_basis()(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("scaling is normalized away by the unit-cell convention") {
  const LatticeBasis lat = make_lattice(2.0 * identity2());
  CHECK(lat.cell_volume() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lat.basis()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lat.dual_basis()(1, 1) == doctest::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("hexagonal basis satisfies (g_i, b_j) = 2 pi delta_ij") {
  Eigen::MatrixXd basis(2, 2);
  basis << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const LatticeBasis lat = make_lattice(basis);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double inner = lat.dual_basis().col(i).dot(lat.basis().col(j));
      CHECK(std::abs(inner - (i == j ? kTwoPi : 0.0)) < 1e-12 * kTwoPi);
    }
}

TEST_CASE("singular or undersized bases are rejected") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 1, 1, 1;
  CHECK_THROWS_AS(make_lattice(bad), SingularBasis);
  CHECK_THROWS_AS(make_lattice(Eigen::MatrixXd::Identity(1, 1)), SingularBasis);
}

TEST_CASE("ball on 2 pi Z^2 at radius 7") {
  const LatticeBasis lat = make_lattice(identity2());
  const auto without_zero = lat.ball(7.0, true);
  REQUIRE(without_zero.size() == 4);
  std::set<std::vector<int>> keys;
  for (const auto& v : without_zero) keys.insert(key(v));
  CHECK(keys == std::set<std::vector<int>>{{-1, 0}, {0, -1}, {0, 1}, {1, 0}});
  CHECK(lat.ball(7.0, false).size() == 5);
  CHECK(lat.ball(1e-9, true).empty());
}

TEST_CASE("ball order is deterministic: norm then lexicographic coeffs") {
  const LatticeBasis lat = make_lattice(identity2());
  const auto ball = lat.ball(7.0, true);
  CHECK(key(ball[0]) == std::vector<int>{-1, 0});
  CHECK(key(ball[1]) == std::vector<int>{0, -1});
  CHECK(key(ball[2]) == std::vector<int>{0, 1});
  CHECK(key(ball[3]) == std::vector<int>{1, 0});
}

TEST_CASE("ball cap raises BallTooLarge") {
  const LatticeBasis lat = make_lattice(identity2());
  CHECK_THROWS_AS(lat.ball(100.0, true, 10), BallTooLarge);
}

TEST_CASE("ball counts match an exhaustive integer-box search") {
  const LatticeBasis lat2 = make_lattice(identity2());
  for (double r : {13.0, 30.0, 50.0}) {
    std::size_t expected = 0;
    const int box = static_cast<int>(std::ceil(r / kTwoPi)) + 1;
    for (int i = -box; i <= box; ++i)
      for (int j = -box; j <= box; ++j) {
        if (i == 0 && j == 0) continue;
        if (kTwoPi * std::sqrt(double(i * i + j * j)) < r) ++expected;
      }
    CHECK(lat2.ball(r, true).size() == expected);
  }

  Eigen::MatrixXd basis3(3, 3);
  basis3 << 1, 0.2, 0, 0, 1.1, 0.1, 0, 0, 0.9;
  const LatticeBasis lat3 = make_lattice(basis3);
  const double r = 40.0;
  const Eigen::MatrixXd dual = lat3.dual_basis();
  std::size_t expected = 0;
  const int box = 12;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j)
      for (int k = -box; k <= box; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        Eigen::Vector3d v = dual * Eigen::Vector3d(i, j, k);
        if (v.norm() < r) ++expected;
      }
  CHECK(lat3.ball(r, true).size() == expected);
}

TEST_CASE("smaller balls are prefixes-by-membership of larger balls") {
  Eigen::MatrixXd basis(2, 2);
  basis << 1.0, 0.3, -0.2, 0.8;
  const LatticeBasis lat = make_lattice(basis);
  const auto small = lat.ball(15.0, true);
  const auto big = lat.ball(22.0, true);
  std::set<std::vector<int>> big_keys;
  for (const auto& v : big) big_keys.insert(key(v));
  for (const auto& v : small) CHECK(big_keys.count(key(v)) == 1);
}

TEST_CASE("reduce_to_fundamental worked examples") {
  const LatticeBasis lat = make_lattice(identity2());

  auto [t0, g0] = lat.reduce_to_fundamental(Quasimomentum{Eigen::Vector2d(0, 0)});
  CHECK(g0.is_zero());
  CHECK(t0.point.norm() == 0.0);

  auto [t1, g1] = lat.reduce_to_fundamental(
      Quasimomentum{Eigen::Vector2d(kTwoPi + 0.3, -0.1)});
  CHECK(g1.coeffs[0] == 1);
  CHECK(g1.coeffs[1] == -1);
  CHECK(t1.point[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(t1.point[1] == doctest::Approx(kTwoPi - 0.1).epsilon(1e-12));

  auto [t2, g2] =
      lat.reduce_to_fundamental(Quasimomentum{Eigen::Vector2d(0.9, 2.4)});
  CHECK(g2.is_zero());
  CHECK(t2.point[0] == doctest::Approx(0.9));
}

TEST_CASE("reduction round-trips and lands in the fundamental cell") {
  Eigen::MatrixXd basis(2, 2);
  basis << 1.0, 0.4, 0.1, 1.3;
  const LatticeBasis lat = make_lattice(basis);
  const Eigen::MatrixXd dual_inv = lat.basis().transpose() / kTwoPi;
  RandomStream rs(77);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(2);
    x << 200.0 * (rs.uniform01() - 0.5), 200.0 * (rs.uniform01() - 0.5);
    auto [t, g] = lat.reduce_to_fundamental(Quasimomentum{x});
    CHECK((g.cartesian + t.point - x).norm() <= 1e-12 * (1.0 + x.norm()));
    const Eigen::VectorXd coords = dual_inv * t.point;
    for (int i = 0; i < 2; ++i) {
      CHECK(coords[i] > -1e-12);
      CHECK(coords[i] < 1.0 + 1e-12);
    }
  }
}

TEST_CASE("dual of the dual recovers the original basis") {
  Eigen::MatrixXd basis(2, 2);
  basis << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  const LatticeBasis lat = make_lattice(basis);
  const Eigen::MatrixXd again =
      kTwoPi * lat.dual_basis().transpose().inverse();
  CHECK((again - lat.basis()).cwiseAbs().maxCoeff() < 1e-10);
}
