#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "blochasym/potential.hpp"
#include "blochasym/rng.hpp"
#include "doctest.h"

using namespace blochasym;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

LatticeBasis square() { return make_lattice(Eigen::MatrixXd::Identity(2, 2)); }

Eigen::VectorXi ci(int a, int b) {
  Eigen::VectorXi v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("conjugate partners are auto-completed") {
  const auto lat = square();
  const auto pot = make_potential(lat, {{ci(1, 0), {1.0, 0.0}}});
  CHECK(pot.size() == 2);
  CHECK(pot.coefficient(ci(1, 0)) == std::complex<double>(1.0, 0.0));
  CHECK(pot.coefficient(ci(-1, 0)) == std::complex<double>(1.0, 0.0));
  // q(x) = 2 cos((2pi,0) . x)
  Eigen::VectorXd x(2);
  x << 0.37, 1.2;
  CHECK(pot.evaluate(x).real() ==
        doctest::Approx(2.0 * std::cos(kTwoPi * 0.37)).epsilon(1e-13));
}

TEST_CASE("empty entries give the free operator") {
  const auto pot = make_potential(square(), {});
  CHECK(pot.empty());
  Eigen::VectorXd x(2);
  x << 0.5, -0.25;
  CHECK(std::abs(pot.evaluate(x)) == 0.0);
}

TEST_CASE("imaginary coefficient completion") {
  const auto pot = make_potential(square(), {{ci(0, 1), {0.0, 0.5}}});
  CHECK(pot.coefficient(ci(0, 1)) == std::complex<double>(0.0, 0.5));
  CHECK(pot.coefficient(ci(0, -1)) == std::complex<double>(0.0, -0.5));
}

TEST_CASE("symmetry conflicts and zero modes are rejected") {
  CHECK_THROWS_AS(make_potential(square(), {{ci(1, 0), {1.0, 0.0}},
                                            {ci(-1, 0), {0.5, 0.5}}}),
                  SymmetryConflict);
  CHECK_THROWS_AS(make_potential(square(), {{ci(0, 0), {1.0, 0.0}}}),
                  ZeroModeSupplied);
  // A zero-valued gamma = 0 entry is simply dropped.
  CHECK(make_potential(square(), {{ci(0, 0), {0.0, 0.0}}}).empty());
}

TEST_CASE("sobolev norm worked values") {
  const auto zero = make_potential(square(), {});
  CHECK(zero.sobolev_norm_sq(0.0) == 0.0);
  CHECK(zero.sobolev_norm_sq(3.0) == 0.0);

  const auto pot = make_potential(square(), {{ci(1, 0), {1.0, 0.0}}});
  CHECK(pot.sobolev_norm_sq(0.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(pot.sobolev_norm_sq(1.0) ==
        doctest::Approx(2.0 * (1.0 + kTwoPi * kTwoPi)).epsilon(1e-14));
}

TEST_CASE("sobolev norm is nondecreasing in s") {
  const auto pot = make_potential(
      square(), {{ci(1, 0), {0.3, 0.0}}, {ci(0, 1), {0.1, 0.2}}, {ci(1, 1), {0.05, 0.0}}});
  double prev = 0.0;
  for (double s : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double v = pot.sobolev_norm_sq(s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("truncation keeps strictly-inside modes and reports the l1 tail") {
  const auto pot = make_potential(square(), {{ci(1, 0), {1.0, 0.0}}});

  auto [same, r0] = pot.truncate(100.0);
  CHECK(same.size() == 2);
  CHECK(r0.tail_bound == 0.0);
  CHECK(r0.kept == 2);

  auto [none, r1] = pot.truncate(1.0);
  CHECK(none.empty());
  CHECK(r1.tail_bound == doctest::Approx(2.0));

  auto [both, r2] = pot.truncate(kTwoPi + 1e-9);
  CHECK(both.size() == 2);
  CHECK(r2.tail_bound == 0.0);

  auto [cut, r3] = pot.truncate(kTwoPi);  // strict |gamma| < radius drops both
  CHECK(cut.empty());
  CHECK(r3.tail_bound == doctest::Approx(2.0));
}

TEST_CASE("truncation is idempotent") {
  const auto pot = make_potential(
      square(), {{ci(1, 0), {1.0, 0.0}}, {ci(2, 1), {0.2, -0.1}}, {ci(0, 3), {0.0, 0.4}}});
  auto [once, ra] = pot.truncate(10.0);
  auto [twice, rb] = once.truncate(10.0);
  CHECK(once.size() == twice.size());
  CHECK(rb.tail_bound == 0.0);
  for (const auto& m : once.support())
    CHECK(twice.coefficient(m.coeffs) == m.value);
}

TEST_CASE("q(x) is real at random points for Hermitian-symmetric data") {
  RandomStream rs(1234);
  const auto pot = make_potential(
      square(), {{ci(1, 0), {0.7, -0.3}}, {ci(0, 2), {0.1, 0.9}}, {ci(2, 1), {-0.4, 0.25}}});
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd x(2);
    x << 4.0 * (rs.uniform01() - 0.5), 4.0 * (rs.uniform01() - 0.5);
    CHECK(std::abs(pot.evaluate(x).imag()) < 1e-10);
  }
}
