#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace blochasym {

// Deterministic random stream: raw mt19937_64 output mapped to doubles by
// hand so results are reproducible bit-for-bit across standard libraries.
// (seed, stream) pairs give independent substreams for parallel work.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform01();  // [0, 1)
  double gaussian();   // standard normal, Box-Muller
  Eigen::VectorXd sphere_point(int dim, double radius);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace blochasym
