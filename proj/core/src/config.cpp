#include "blochasym/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace blochasym {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& value, int line) {
  std::vector<double> out;
  std::istringstream ss(value);
  double v;
  while (ss >> v) out.push_back(v);
  if (!ss.eof())
    throw ConfigParse("line " + std::to_string(line) + ": expected numbers, got '" +
                      value + "'");
  return out;
}

double parse_double(const std::string& value, int line) {
  const auto v = parse_doubles(value, line);
  if (v.size() != 1)
    throw ConfigParse("line " + std::to_string(line) + ": expected one number");
  return v[0];
}

long long parse_int(const std::string& value, int line) {
  const double v = parse_double(value, line);
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigParse("line " + std::to_string(line) + ": expected true/false");
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  cfg.rho.clear();
  cfg.points.clear();
  cfg.entries.clear();
  cfg.basis.clear();

  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigParse("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParse("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section == "lattice") {
      if (key == "dim") cfg.dim = static_cast<int>(parse_int(value, lineno));
      else if (key == "basis") cfg.basis = parse_doubles(value, lineno);
      else throw ConfigParse("line " + std::to_string(lineno) + ": unknown lattice key '" + key + "'");
    } else if (section == "potential") {
      if (key == "entry") {
        const auto v = parse_doubles(value, lineno);
        if (static_cast<int>(v.size()) != cfg.dim + 2)
          throw ConfigParse("line " + std::to_string(lineno) +
                            ": entry needs dim integers then re im");
        ConfigEntry e;
        for (int i = 0; i < cfg.dim; ++i) {
          const double c = v[static_cast<std::size_t>(i)];
          if (c != std::floor(c))
            throw ConfigParse("line " + std::to_string(lineno) +
                              ": entry coordinates must be integers");
          e.coeffs.push_back(static_cast<int>(c));
        }
        e.re = v[static_cast<std::size_t>(cfg.dim)];
        e.im = v[static_cast<std::size_t>(cfg.dim) + 1];
        cfg.entries.push_back(std::move(e));
      } else {
        throw ConfigParse("line " + std::to_string(lineno) + ": unknown potential key '" + key + "'");
      }
    } else if (section == "constants") {
      if (key == "s") cfg.s = parse_double(value, lineno);
      else if (key == "resonance_multiplier") cfg.resonance_multiplier = parse_double(value, lineno);
      else if (key == "c8") cfg.c8 = parse_double(value, lineno);
      else if (key == "ball_cap") cfg.ball_cap = parse_int(value, lineno);
      else if (key == "basis_cap") cfg.basis_cap = static_cast<int>(parse_int(value, lineno));
      else if (key == "block_cap") cfg.block_cap = static_cast<int>(parse_int(value, lineno));
      else if (key == "order_cap") cfg.order_cap = static_cast<int>(parse_int(value, lineno));
      else if (key == "coeff_floor_c") cfg.coeff_floor_c = parse_double(value, lineno);
      else throw ConfigParse("line " + std::to_string(lineno) + ": unknown constants key '" + key + "'");
    } else if (section == "run") {
      if (key == "command") cfg.command = value;
      else if (key == "rho") cfg.rho = parse_doubles(value, lineno);
      else if (key == "point") {
        const auto v = parse_doubles(value, lineno);
        if (static_cast<int>(v.size()) != cfg.dim)
          throw ConfigParse("line " + std::to_string(lineno) + ": point needs dim reals");
        cfg.points.push_back(v);
      }
      else if (key == "order") cfg.order = static_cast<int>(parse_int(value, lineno));
      else if (key == "seed") cfg.seed = static_cast<unsigned long long>(parse_int(value, lineno));
      else if (key == "samples") cfg.samples = parse_int(value, lineno);
      else if (key == "max_tries") cfg.max_tries = static_cast<int>(parse_int(value, lineno));
      else if (key == "tol_scale") cfg.tol_scale = parse_double(value, lineno);
      else if (key == "practical_eps") cfg.practical_eps = parse_bool(value, lineno);
      else if (key == "eps_override") cfg.eps_override = parse_double(value, lineno);
      else if (key == "eps1_override") cfg.eps1_override = parse_double(value, lineno);
      else if (key == "basis_radius") cfg.basis_radius = parse_double(value, lineno);
      else if (key == "cutoff") cfg.cutoff = parse_double(value, lineno);
      else if (key == "format") cfg.format = value;
      else if (key == "output") cfg.output = value;
      else if (key == "threads") cfg.threads = static_cast<int>(parse_int(value, lineno));
      else if (key == "decay_slack") cfg.decay_slack = parse_double(value, lineno);
      else throw ConfigParse("line " + std::to_string(lineno) + ": unknown run key '" + key + "'");
    } else {
      throw ConfigParse("line " + std::to_string(lineno) + ": key outside a known section");
    }
  }

  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigParse("format must be csv or json");
  if (cfg.ball_cap <= 0 || cfg.basis_cap <= 0 || cfg.block_cap <= 0 || cfg.order_cap <= 0)
    throw ConfigParse("caps must be positive");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParse("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  out << "[lattice]\n";
  out << "dim = " << cfg.dim << "\n";
  if (!cfg.basis.empty()) {
    out << "basis =";
    for (double v : cfg.basis) out << " " << fmt17(v);
    out << "\n";
  }
  out << "\n[potential]\n";
  for (const auto& e : cfg.entries) {
    out << "entry =";
    for (int c : e.coeffs) out << " " << c;
    out << " " << fmt17(e.re) << " " << fmt17(e.im) << "\n";
  }
  out << "\n[constants]\n";
  out << "s = " << fmt17(cfg.s) << "\n";
  out << "resonance_multiplier = " << fmt17(cfg.resonance_multiplier) << "\n";
  out << "c8 = " << fmt17(cfg.c8) << "\n";
  out << "ball_cap = " << cfg.ball_cap << "\n";
  out << "basis_cap = " << cfg.basis_cap << "\n";
  out << "block_cap = " << cfg.block_cap << "\n";
  out << "order_cap = " << cfg.order_cap << "\n";
  out << "coeff_floor_c = " << fmt17(cfg.coeff_floor_c) << "\n";
  out << "\n[run]\n";
  if (!cfg.command.empty()) out << "command = " << cfg.command << "\n";
  if (!cfg.rho.empty()) {
    out << "rho =";
    for (double r : cfg.rho) out << " " << fmt17(r);
    out << "\n";
  }
  for (const auto& p : cfg.points) {
    out << "point =";
    for (double v : p) out << " " << fmt17(v);
    out << "\n";
  }
  out << "order = " << cfg.order << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "samples = " << cfg.samples << "\n";
  out << "max_tries = " << cfg.max_tries << "\n";
  out << "tol_scale = " << fmt17(cfg.tol_scale) << "\n";
  out << "practical_eps = " << (cfg.practical_eps ? "true" : "false") << "\n";
  out << "eps_override = " << fmt17(cfg.eps_override) << "\n";
  out << "eps1_override = " << fmt17(cfg.eps1_override) << "\n";
  out << "basis_radius = " << fmt17(cfg.basis_radius) << "\n";
  out << "cutoff = " << fmt17(cfg.cutoff) << "\n";
  out << "format = " << cfg.format << "\n";
  if (!cfg.output.empty()) out << "output = " << cfg.output << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "decay_slack = " << fmt17(cfg.decay_slack) << "\n";
}

LatticeBasis lattice_from(const RunConfig& cfg) {
  Eigen::MatrixXd basis;
  if (cfg.basis.empty()) {
    basis = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  } else {
    if (static_cast<int>(cfg.basis.size()) != cfg.dim * cfg.dim)
      throw ConfigParse("basis must have dim*dim entries");
    basis.resize(cfg.dim, cfg.dim);
    for (int r = 0; r < cfg.dim; ++r)
      for (int c = 0; c < cfg.dim; ++c)
        basis(r, c) = cfg.basis[static_cast<std::size_t>(r * cfg.dim + c)];
  }
  return make_lattice(basis);
}

FourierPotential potential_from(const RunConfig& cfg, const LatticeBasis& lattice) {
  std::vector<PotentialEntry> entries;
  for (const auto& e : cfg.entries) {
    PotentialEntry pe;
    pe.coeffs.resize(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) pe.coeffs[i] = e.coeffs[static_cast<std::size_t>(i)];
    pe.value = {e.re, e.im};
    entries.push_back(std::move(pe));
  }
  return make_potential(lattice, entries);
}

AsymptoticConstants constants_from(const RunConfig& cfg) {
  return asymptotic_constants(cfg.dim, cfg.s);
}

double coeff_floor_from(const RunConfig& cfg, const AsymptoticConstants& constants,
                        double rho) {
  const double c = cfg.coeff_floor_c >= 0
                       ? cfg.coeff_floor_c
                       : 0.5 * (constants.d - 1) * constants.q_exp;
  return std::pow(rho, -c * constants.alpha);
}

}  // namespace blochasym
