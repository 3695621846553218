#include <benchmark/benchmark.h>

#include <numbers>

#include "blochasym/expansion.hpp"
#include "blochasym/isoenergetic.hpp"
#include "blochasym/oracle.hpp"
#include "blochasym/rng.hpp"

namespace {

using namespace blochasym;

Eigen::VectorXi ci(int a, int b) {
  Eigen::VectorXi v(2);
  v << a, b;
  return v;
}

const LatticeBasis& square_lattice() {
  static const LatticeBasis lat = make_lattice(Eigen::MatrixXd::Identity(2, 2));
  return lat;
}

const FourierPotential& cosine_pair() {
  static const FourierPotential pot = make_potential(
      square_lattice(), {{ci(1, 0), {0.1, 0.0}}, {ci(0, 1), {0.1, 0.0}}});
  return pot;
}

Quasimomentum q2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return Quasimomentum{v};
}

void BM_enumerate_ball(benchmark::State& state) {
  const double radius = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto ball = square_lattice().ball(radius, true);
    benchmark::DoNotOptimize(ball.size());
  }
}
BENCHMARK(BM_enumerate_ball)->Arg(30)->Arg(60)->Arg(120);

void BM_bloch_eigen(benchmark::State& state) {
  const double rho = static_cast<double>(state.range(0));
  const Quasimomentum t = q2(0.37, 0.59);
  const double radius = default_basis_radius(cosine_pair(), rho);
  for (auto _ : state) {
    const SpectralResult res = bloch_eigen(cosine_pair(), t, radius);
    benchmark::DoNotOptimize(res.eigenvalue(0));
  }
  state.counters["basis"] = static_cast<double>(
      plane_wave_basis(square_lattice(), t, radius, 20000).size());
}
BENCHMARK(BM_bloch_eigen)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_S_k(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Quasimomentum x = q2(28.9, 7.4);
  const double a = x.squared_norm();
  for (auto _ : state) {
    const SumResult r = S_k(a, x, cosine_pair(), k);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_S_k)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_classify_sphere(benchmark::State& state) {
  const double rho = 50.0;
  const AsymptoticConstants c = asymptotic_constants(2, 45.0);
  const auto dirs =
      square_lattice().ball(c.p * std::pow(rho, c.alpha), true);
  RandomStream rs(1);
  std::vector<Quasimomentum> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back(Quasimomentum{rs.sphere_point(2, rho)});
  for (auto _ : state) {
    int resonant = 0;
    for (const auto& x : pts)
      if (!is_nonresonant(x, rho, c, dirs)) ++resonant;
    benchmark::DoNotOptimize(resonant);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_classify_sphere);

}  // namespace

BENCHMARK_MAIN();
