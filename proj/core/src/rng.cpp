#include "blochasym/rng.hpp"

#include <cmath>
#include <numbers>

namespace blochasym {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Eigen::VectorXd RandomStream::sphere_point(int dim, double radius) {
  while (true) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian();
    const double n = v.norm();
    if (n > 1e-12) return v * (radius / n);
  }
}

}  // namespace blochasym
