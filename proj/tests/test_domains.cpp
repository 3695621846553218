#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "blochasym/domains.hpp"
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

Quasimomentum q2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return Quasimomentum{v};
}
}  // namespace

TEST_CASE("exponent system at d=2, s=45") {
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  CHECK(c.q_exp == 13);
  CHECK(c.alpha == doctest::Approx(1.0 / 13.0).epsilon(1e-15));
  CHECK(c.alpha_of(1) == doctest::Approx(3.0 / 13.0).epsilon(1e-15));
  CHECK(c.alpha_of(2) == doctest::Approx(9.0 / 13.0).epsilon(1e-15));
  CHECK(c.s0 == doctest::Approx(45.0).epsilon(1e-15));
  CHECK(c.p == doctest::Approx(43.0));
  CHECK(c.p1 == 15);
  CHECK(c.k1 == 10);
  CHECK(c.smoothness_ok);

  REQUIRE(c.inequality_report.size() == 7);
  for (const auto& ineq : c.inequality_report) {
    CHECK(ineq.holds);
    CHECK(ineq.margin > 0.0);
  }
  // alpha_1 + d alpha < 1 - alpha reads 5/13 < 12/13: margin 7/13.
  CHECK(c.inequality_report[0].margin ==
        doctest::Approx(7.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("exponent system at d=3, s=158") {
  const AsymptoticConstants c = asymptotic_constants(3, 158.0);
  CHECK(c.q_exp == 32);
  CHECK(c.alpha == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
  CHECK(c.s0 == doctest::Approx(157.25).epsilon(1e-15));
  CHECK(c.p == doctest::Approx(155.0));
  CHECK(c.smoothness_ok);
  for (const auto& ineq : c.inequality_report) CHECK(ineq.holds);
}

TEST_CASE("low smoothness is a warning flag, not an error") {
  const AsymptoticConstants c = asymptotic_constants(2, 20.0);
  CHECK_FALSE(c.smoothness_ok);
  CHECK(c.p == doctest::Approx(18.0));
  CHECK_THROWS_AS(asymptotic_constants(1, 45.0), Error);
  CHECK_THROWS_AS(asymptotic_constants(2, 1.5), Error);
}

TEST_CASE("resonance slab worked examples") {
  const auto lat = square();
  const LatticeVector b = lat.vector(ci(1, 0));

  // Perpendicular-bisector point: defect exactly zero.
  const auto on = in_resonance_slab(q2(-std::numbers::pi, 5.0), b, 1e-12);
  CHECK(on.inside);
  CHECK(on.margin == 1e-12);

  // x = (10pi, 0.3): defect 44 pi^2, far outside any radius below 10.
  const auto off = in_resonance_slab(q2(10.0 * std::numbers::pi, 0.3), b, 10.0);
  CHECK_FALSE(off.inside);
  CHECK(-off.margin + 10.0 ==
        doctest::Approx(44.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-12));

  // Origin: defect |b|^2.
  const auto origin = in_resonance_slab(q2(0, 0), b, kTwoPi * kTwoPi + 1.0);
  CHECK(origin.inside);

  CHECK_THROWS_AS(in_resonance_slab(q2(1, 1), lat.vector(ci(0, 0)), 1.0), Error);
}

TEST_CASE("slab identity matches the direct norm computation") {
  const auto lat = square();
  RandomStream rs(42);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(2);
    x << 60.0 * (rs.uniform01() - 0.5), 60.0 * (rs.uniform01() - 0.5);
    const LatticeVector b = lat.vector(ci(1 + int(rs.uniform01() * 3),
                                          int(rs.uniform01() * 4) - 2));
    const double direct = x.squaredNorm() - (x + b.cartesian).squaredNorm();
    const double identity = -2.0 * x.dot(b.cartesian) - b.cartesian.squaredNorm();
    CHECK(std::abs(direct - identity) < 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("generic far-from-bisector point is non-resonant") {
  const auto lat = square();
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(10.0 * std::numbers::pi + 0.37, 0.59);
  const double rho = x.norm();
  const DomainClass dc = classify(x, rho, c, lat);
  CHECK(dc.kind == DomainKind::NonResonant);
  CHECK(dc.k == 0);
  CHECK(dc.directions.empty());
}

TEST_CASE("bisector point is resonant with the expected direction") {
  const auto lat = square();
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 30.0;
  const Quasimomentum x = q2(-std::numbers::pi,
                             std::sqrt(rho * rho - std::numbers::pi * std::numbers::pi));
  const DomainClass dc = classify(x, rho, c, lat);
  REQUIRE(dc.kind == DomainKind::Resonant);
  CHECK(dc.k >= 1);
  bool found = false;
  for (const auto& d : dc.directions)
    found = found || (d.coeffs[0] == 1 && d.coeffs[1] == 0);
  CHECK(found);
  CHECK(dc.slab_defects.size() == dc.directions.size());
}

TEST_CASE("double bisector point reports full resonance at desk scale") {
  const auto lat = square();
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const Quasimomentum x = q2(-std::numbers::pi, -std::numbers::pi);
  const double rho = x.norm();
  const DomainClass dc = classify(x, rho, c, lat);
  REQUIRE(dc.kind == DomainKind::Resonant);
  CHECK(dc.k == 2);
  CHECK(dc.full_resonance(2));
}

TEST_CASE("NonResonant iff no slab of radius rho^alpha_1 contains x") {
  const auto lat = square();
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 30.0;
  const auto dirs = lat.ball(c.p * std::pow(rho, c.alpha), true);
  RandomStream rs(7);
  for (int i = 0; i < 200; ++i) {
    const Quasimomentum x{rs.sphere_point(2, rho)};
    const bool slab_free = is_nonresonant(x, rho, c, dirs);
    const DomainClass dc = classify_with_directions(x, rho, c, dirs);
    CHECK((dc.kind == DomainKind::NonResonant) == slab_free);
  }
}

TEST_CASE("E_2 classifications always sit inside E_1") {
  const auto lat = square();
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const double rho = 30.0;
  const auto dirs = lat.ball(c.p * std::pow(rho, c.alpha), true);
  RandomStream rs(11);
  int found_k2 = 0;
  for (int i = 0; i < 4000 && found_k2 < 10; ++i) {
    // Near-bisector construction keeps resonant cases frequent.
    const auto& b = dirs[static_cast<std::size_t>(i % 4)];
    const double u = (2.0 * rs.uniform01() - 1.0) * c.slab_radius(rho, 1) * 0.9;
    const double cb = (u - b.cartesian.squaredNorm()) / (2.0 * b.cartesian.norm());
    if (std::abs(cb) >= rho) continue;
    Eigen::VectorXd bhat = b.cartesian.normalized();
    Eigen::VectorXd that(2);
    that << -bhat[1], bhat[0];
    const double ct = std::sqrt(rho * rho - cb * cb);
    const Quasimomentum x{cb * bhat + ct * that};
    const DomainClass dc = classify_with_directions(x, rho, c, dirs);
    if (dc.kind == DomainKind::Resonant && dc.k == 2) {
      ++found_k2;
      CHECK_FALSE(is_nonresonant(x, rho, c, dirs));
    }
  }
  CHECK(found_k2 > 0);
}
