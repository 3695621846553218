#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "blochasym/domains.hpp"
#include "blochasym/potential.hpp"

namespace blochasym {

struct ConfigEntry {
  std::vector<int> coeffs;
  double re = 0.0;
  double im = 0.0;
  bool operator==(const ConfigEntry&) const = default;
};

// One experiment bundle: lattice, potential, exponent overrides, and the
// command-specific knobs.  Command-line flags override file fields.
struct RunConfig {
  // [lattice]
  int dim = 2;
  std::vector<double> basis;  // row-major dim x dim; empty = identity

  // [potential]
  std::vector<ConfigEntry> entries;

  // [constants]
  double s = 45.0;
  double resonance_multiplier = -1.0;  // direction ball multiplier; <0 -> p
  double c8 = 1.0;
  long long ball_cap = 10000000;
  int basis_cap = 20000;
  int block_cap = 4000;
  int order_cap = 4;
  double coeff_floor_c = -1.0;  // floor = rho^{-c alpha}; <0 -> (d-1)q/2

  // [run]
  std::string command;
  std::vector<double> rho;
  std::vector<std::vector<double>> points;
  int order = 2;
  unsigned long long seed = 12345ULL;
  long long samples = 100000;
  int max_tries = 50;
  double tol_scale = 1e-9;
  bool practical_eps = true;
  double eps_override = -1.0;
  double eps1_override = -1.0;
  double basis_radius = -1.0;  // <0 -> default rule
  double cutoff = -1.0;        // <0 -> full support
  std::string format = "csv";  // csv | json
  std::string output;          // empty -> stdout
  int threads = 0;
  double decay_slack = 0.8;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
void write_config(std::ostream& out, const RunConfig& cfg);

// Materialized pieces.
LatticeBasis lattice_from(const RunConfig& cfg);
FourierPotential potential_from(const RunConfig& cfg, const LatticeBasis& lattice);
AsymptoticConstants constants_from(const RunConfig& cfg);
// rho^{-c alpha} with the configured c.
double coeff_floor_from(const RunConfig& cfg, const AsymptoticConstants& constants,
                        double rho);

}  // namespace blochasym
