#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blochasym/runner.hpp"

namespace {

// Flags shared by every subcommand; they override config-file fields.
struct Overrides {
  std::string config_path;
  std::vector<double> rho;
  std::vector<std::string> points;
  std::string points_file;
  std::string format, output;
  int threads = -1;
  long long seed = -1;
  long long samples = -1;
  int order = -1;
  int max_tries = -1;
  double s = -1;
  double c8 = -1;
  double tol_scale = -1;
  double basis_radius = -1;
  double eps_override = -1, eps1_override = -1;
  int practical = -1;
  int dim = -1;
  std::string profile = "desk";
};

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "config file path");
  cmd->add_option("--rho", ov.rho, "rho values");
  cmd->add_option("--point", ov.points,
                  "point coordinates, e.g. --point \"0.37 0.59\" (repeatable)");
  cmd->add_option("--points-file", ov.points_file,
                  "CSV file of points, one row of d reals per line");
  cmd->add_option("--format", ov.format, "csv or json");
  cmd->add_option("--output", ov.output, "output path (default stdout)");
  cmd->add_option("--threads", ov.threads, "worker count (0 = hardware)");
  cmd->add_option("--seed", ov.seed, "random seed");
  cmd->add_option("--samples", ov.samples, "Monte Carlo sample count");
  cmd->add_option("--order", ov.order, "expansion order");
  cmd->add_option("--tries", ov.max_tries, "max witness attempts");
  cmd->add_option("--s", ov.s, "Sobolev smoothness s");
  cmd->add_option("--d", ov.dim, "dimension (identity lattice)");
  cmd->add_option("--c8", ov.c8, "slab-radius multiplier");
  cmd->add_option("--tol-scale", ov.tol_scale, "bisection tolerance scale");
  cmd->add_option("--basis-radius", ov.basis_radius, "oracle basis radius override");
  cmd->add_option("--eps", ov.eps_override, "bracket half-width override");
  cmd->add_option("--eps1", ov.eps1_override, "isolation scale override");
  cmd->add_flag("--practical,!--paper-eps", ov.practical,
                "size eps1 from the local level spacing (default)");
}

std::vector<double> parse_row(std::string text) {
  for (char& ch : text)
    if (ch == ',') ch = ' ';
  std::istringstream ss(text);
  std::vector<double> row;
  double v;
  while (ss >> v) row.push_back(v);
  if (!ss.eof()) throw blochasym::Error("cannot parse point row '" + text + "'");
  return row;
}

blochasym::RunConfig merge(const Overrides& ov, const std::string& command) {
  blochasym::RunConfig cfg;
  if (!ov.config_path.empty()) cfg = blochasym::parse_config_file(ov.config_path);
  cfg.command = command;
  if (ov.dim > 0) cfg.dim = ov.dim;
  if (!ov.rho.empty()) cfg.rho = ov.rho;
  if (!ov.points.empty()) {
    cfg.points.clear();
    for (const auto& p : ov.points) cfg.points.push_back(parse_row(p));
  }
  if (!ov.points_file.empty()) {
    std::ifstream in(ov.points_file);
    if (!in) throw blochasym::Error("cannot open points file '" + ov.points_file + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      cfg.points.push_back(parse_row(line));
    }
  }
  if (!ov.format.empty()) cfg.format = ov.format;
  if (!ov.output.empty()) cfg.output = ov.output;
  if (ov.threads >= 0) cfg.threads = ov.threads;
  if (ov.seed >= 0) cfg.seed = static_cast<unsigned long long>(ov.seed);
  if (ov.samples > 0) cfg.samples = ov.samples;
  if (ov.order > 0) cfg.order = ov.order;
  if (ov.max_tries > 0) cfg.max_tries = ov.max_tries;
  if (ov.s > 0) cfg.s = ov.s;
  if (ov.c8 > 0) cfg.c8 = ov.c8;
  if (ov.tol_scale > 0) cfg.tol_scale = ov.tol_scale;
  if (ov.basis_radius > 0) cfg.basis_radius = ov.basis_radius;
  if (ov.eps_override > 0) cfg.eps_override = ov.eps_override;
  if (ov.eps1_override > 0) cfg.eps1_override = ov.eps1_override;
  if (ov.practical >= 0) cfg.practical_eps = ov.practical > 0;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch eigenvalue asymptotics for the periodic Schrodinger operator"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {
      "constants", "classify", "solve",      "expand",  "resonance",
      "blochfn",   "simplicity", "isosurface", "measure", "validate"};
  const std::vector<std::string> help = {
      "exponent system and the seven consistency margins",
      "non-resonance / resonance classification of points",
      "exact diagonalization of the truncated Bloch fiber",
      "non-resonance eigenvalue predictions vs the oracle",
      "resonance block spectrum vs the oracle",
      "Bloch coefficient predictions vs the oracle",
      "simplicity (isolation) conditions per point",
      "isoenergetic surface witnesses Lambda(y) = rho^2",
      "Monte Carlo non-resonant fraction of the sphere",
      "run the full acceptance suite"};

  std::vector<Overrides> ovs(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], help[i]);
    add_common(sub, ovs[i]);
    if (commands[i] == "validate")
      sub->add_option("--profile", ovs[i].profile, "acceptance profile (desk)");
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (app.get_subcommand(commands[i])->parsed()) {
      if (commands[i] == "validate" && ovs[i].profile != "desk") {
        std::cerr << "error: unknown profile '" << ovs[i].profile << "'\n";
        return 1;
      }
      try {
        return blochasym::run_command(merge(ovs[i], commands[i]));
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
    }
  }
  return 1;
}
