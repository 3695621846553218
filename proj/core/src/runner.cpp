#include "blochasym/runner.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blochasym/acceptance.hpp"
#include "blochasym/bloch_function.hpp"
#include "blochasym/decay_fit.hpp"
#include "blochasym/isoenergetic.hpp"
#include "blochasym/parallel.hpp"
#include "blochasym/table.hpp"

namespace blochasym {

namespace {

std::string g17(double v) { return format_g17(v); }

double first_rho(const RunConfig& cfg) {
  if (cfg.rho.empty()) throw Error("this command needs at least one rho value");
  return cfg.rho.front();
}

std::vector<Quasimomentum> config_points(const RunConfig& cfg) {
  if (cfg.points.empty()) throw Error("this command needs at least one point");
  std::vector<Quasimomentum> out;
  for (const auto& row : cfg.points) {
    Eigen::VectorXd v(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i) {
      v[i] = row[static_cast<std::size_t>(i)];
      if (!std::isfinite(v[i])) throw Error("point has non-finite components");
    }
    out.push_back(Quasimomentum{v});
  }
  return out;
}

double basis_radius_for(const RunConfig& cfg, const FourierPotential& pot, double rho) {
  return cfg.basis_radius > 0 ? cfg.basis_radius : default_basis_radius(pot, rho);
}

Table cmd_constants(const RunConfig& cfg) {
  const AsymptoticConstants c = constants_from(cfg);
  Table t;
  t.columns = {"quantity", "value"};
  t.add_row({"d", std::to_string(c.d)});
  t.add_row({"s", g17(c.s)});
  t.add_row({"q", std::to_string(c.q_exp)});
  t.add_row({"alpha", g17(c.alpha)});
  for (int k = 1; k <= c.d; ++k)
    t.add_row({"alpha_" + std::to_string(k), g17(c.alpha_of(k))});
  t.add_row({"p", g17(c.p)});
  t.add_row({"p1", std::to_string(c.p1)});
  t.add_row({"k1", std::to_string(c.k1)});
  t.add_row({"s0", g17(c.s0)});
  t.add_row({"smoothness_ok", c.smoothness_ok ? "true" : "false"});
  for (const auto& ineq : c.inequality_report) {
    t.add_row({"margin: " + ineq.name, g17(ineq.margin)});
  }
  return t;
}

Table cmd_classify(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto c = constants_from(cfg);
  const auto points = config_points(cfg);
  ClassifyOptions copts;
  copts.dir_ball_multiplier = cfg.resonance_multiplier;

  Table t;
  t.columns = {"point", "rho", "kind", "k"};
  for (int j = 1; j <= cfg.dim; ++j) {
    for (int i = 1; i <= cfg.dim; ++i)
      t.columns.push_back("dir" + std::to_string(j) + "_c" + std::to_string(i));
    t.columns.push_back("defect" + std::to_string(j));
  }

  std::vector<std::vector<std::string>> rows(points.size());
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    const double rho = cfg.rho.empty() ? points[i].norm() : cfg.rho.front();
    const DomainClass dc = classify(points[i], rho, c, lat, copts);
    std::vector<std::string> row;
    row.push_back(std::to_string(i));
    row.push_back(g17(rho));
    row.push_back(dc.kind == DomainKind::NonResonant ? "nonresonant" : "resonant");
    row.push_back(std::to_string(dc.k));
    for (int j = 0; j < cfg.dim; ++j) {
      if (j < static_cast<int>(dc.directions.size())) {
        for (int ci = 0; ci < cfg.dim; ++ci)
          row.push_back(std::to_string(dc.directions[static_cast<std::size_t>(j)].coeffs[ci]));
        row.push_back(g17(dc.slab_defects[static_cast<std::size_t>(j)]));
      } else {
        for (int ci = 0; ci <= cfg.dim; ++ci) row.push_back("");
      }
    }
    rows[i] = std::move(row);
  });
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

Table cmd_solve(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const double rho = first_rho(cfg);
  Quasimomentum t_point{Eigen::VectorXd::Zero(cfg.dim)};
  if (!cfg.points.empty()) t_point = config_points(cfg).front();

  OracleOptions oo;
  oo.basis_cap = cfg.basis_cap;
  const SpectralResult res =
      bloch_eigen(pot, t_point, basis_radius_for(cfg, pot, rho), oo);

  Table t;
  t.columns = {"N", "lambda", "b_abs"};
  for (int i = 1; i <= cfg.dim; ++i) t.columns.push_back("gamma_c" + std::to_string(i));
  for (int n = 0; n < res.size(); ++n) {
    int dominant = 0;
    double best = -1.0;
    for (int i = 0; i < res.size(); ++i) {
      const double a = std::abs(res.vectors()(i, n));
      if (a > best) {
        best = a;
        dominant = i;
      }
    }
    std::vector<std::string> row{std::to_string(n), g17(res.eigenvalue(n)), g17(best)};
    for (int i = 0; i < cfg.dim; ++i)
      row.push_back(std::to_string(res.basis()[static_cast<std::size_t>(dominant)].coeffs[i]));
    t.add_row(std::move(row));
  }
  return t;
}

Table cmd_expand(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const auto c = constants_from(cfg);
  const double rho = first_rho(cfg);
  const auto points = config_points(cfg);

  ExpansionOptions eopts;
  eopts.cutoff = cfg.cutoff;

  Table t;
  t.columns = {"point", "k", "F_prev", "prediction", "oracle_lambda", "gap",
               "min_denominator"};
  std::vector<std::vector<std::vector<std::string>>> rows(points.size());
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    auto [tq, gamma] = lat.reduce_to_fundamental(points[i]);
    const Quasimomentum x{gamma.cartesian + tq.point};
    OracleOptions oo;
    oo.basis_cap = cfg.basis_cap;
    const SpectralResult res =
        bloch_eigen(pot, tq, basis_radius_for(cfg, pot, rho), oo);
    const ExpansionReport rep =
        predict_eigenvalue(x, pot, cfg.order, c, rho, eopts, &res,
                           coeff_floor_from(cfg, c, rho));
    for (const auto& ord : rep.orders) {
      std::vector<std::string> row;
      row.push_back(std::to_string(i));
      row.push_back(std::to_string(ord.k));
      row.push_back(g17(ord.f_prev));
      row.push_back(g17(ord.prediction));
      row.push_back(rep.oracle_lambda ? g17(*rep.oracle_lambda) : "");
      row.push_back(ord.oracle_gap ? g17(*ord.oracle_gap) : "");
      row.push_back(g17(rep.iterability_min));
      rows[i].push_back(std::move(row));
    }
  });
  for (auto& point_rows : rows)
    for (auto& r : point_rows) t.add_row(std::move(r));
  return t;
}

Table cmd_resonance(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const auto c = constants_from(cfg);
  const double rho = first_rho(cfg);
  const auto points = config_points(cfg);
  ClassifyOptions copts;
  copts.dir_ball_multiplier = cfg.resonance_multiplier;
  BlockOptions bopts;
  bopts.cap = cfg.block_cap;

  Table t;
  t.columns = {"point", "b_k", "lambda_near1", "lambda_near2", "lambda_near3",
               "lambda_near4", "lambda_near5", "oracle_lambda", "gap"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DomainClass dc = classify(points[i], rho, c, lat, copts);
    if (dc.kind != DomainKind::Resonant)
      throw Error("resonance: point " + std::to_string(i) + " is non-resonant");
    auto [tq, gamma] = lat.reduce_to_fundamental(points[i]);
    const Quasimomentum x{gamma.cartesian + tq.point};
    OracleOptions oo;
    oo.basis_cap = cfg.basis_cap;
    const SpectralResult res =
        bloch_eigen(pot, tq, basis_radius_for(cfg, pot, rho), oo);
    const ResonanceBlock block = assemble_C(x, dc.directions, pot, c, rho, bopts);
    Eigen::VectorXd lam = block_eigenvalues(block);

    std::vector<int> order(static_cast<std::size_t>(lam.size()));
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    const double rho_sq = rho * rho;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(lam[a] - rho_sq) < std::abs(lam[b] - rho_sq);
    });

    const ResonancePrediction pred = resonance_predict(
        x, dc.directions, pot, c, rho, &res, -1.0, coeff_floor_from(cfg, c, rho), bopts);

    std::vector<std::string> row{std::to_string(i), std::to_string(block.size())};
    for (int j = 0; j < 5; ++j)
      row.push_back(j < lam.size() ? g17(lam[order[static_cast<std::size_t>(j)]]) : "");
    row.push_back(pred.oracle_lambda ? g17(*pred.oracle_lambda) : "");
    row.push_back(pred.gap ? g17(*pred.gap) : "");
    t.add_row(std::move(row));
  }
  return t;
}

Table cmd_blochfn(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const auto c = constants_from(cfg);
  const double rho = first_rho(cfg);
  const auto points = config_points(cfg);

  Table t;
  t.columns = {"point"};
  for (int i = 1; i <= cfg.dim; ++i) t.columns.push_back("gp_c" + std::to_string(i));
  t.columns.insert(t.columns.end(), {"pred_re", "pred_im", "oracle_re",
                                     "oracle_im", "abs_error"});

  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [tq, gamma] = lat.reduce_to_fundamental(points[i]);
    const Quasimomentum x{gamma.cartesian + tq.point};
    BlochOptions bopts;
    bopts.p_order_cap = cfg.order_cap;
    bopts.expansion.cutoff = cfg.cutoff;
    const BlochPrediction pred = predict_coefficients(x, pot, cfg.order, c, rho, bopts);

    OracleOptions oo;
    oo.basis_cap = cfg.basis_cap;
    const SpectralResult res =
        bloch_eigen(pot, tq, basis_radius_for(cfg, pot, rho), oo);
    auto n = match_eigenvalue(res, gamma, 0.5 * c.slab_radius(rho, 1),
                              coeff_floor_from(cfg, c, rho));
    if (!n) throw NoOracleMatch("blochfn: no oracle eigenvalue matched");
    const Eigen::VectorXcd fixed = gauge_fixed_vector(res, *n, gamma);

    // Center row: gamma' = 0.
    {
      const auto idx = res.basis_index(gamma.coeffs);
      const std::complex<double> oracle_b = fixed[*idx];
      std::vector<std::string> row{std::to_string(i)};
      for (int ci = 0; ci < cfg.dim; ++ci) row.push_back("0");
      row.push_back(g17(pred.b_center));
      row.push_back(g17(0.0));
      row.push_back(g17(oracle_b.real()));
      row.push_back(g17(oracle_b.imag()));
      row.push_back(g17(std::abs(oracle_b - std::complex<double>(pred.b_center, 0.0))));
      t.add_row(std::move(row));
    }
    for (const auto& off : pred.offsets) {
      const Eigen::VectorXi target = gamma.coeffs + off.gamma_prime.coeffs;
      std::complex<double> oracle_b{0.0, 0.0};
      if (auto idx = res.basis_index(target)) oracle_b = fixed[*idx];
      std::vector<std::string> row{std::to_string(i)};
      for (int ci = 0; ci < cfg.dim; ++ci)
        row.push_back(std::to_string(off.gamma_prime.coeffs[ci]));
      row.push_back(g17(off.value.real()));
      row.push_back(g17(off.value.imag()));
      row.push_back(g17(oracle_b.real()));
      row.push_back(g17(oracle_b.imag()));
      row.push_back(g17(std::abs(oracle_b - off.value)));
      t.add_row(std::move(row));
    }
  }
  return t;
}

Table cmd_simplicity(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const auto c = constants_from(cfg);
  const double rho = first_rho(cfg);
  const auto points = config_points(cfg);

  SimplicityOptions sopts;
  sopts.eps1_override = cfg.eps1_override;
  sopts.order_cap = cfg.order_cap;

  Table t;
  t.columns = {"point", "passed", "eps1", "K_size", "violations", "worst_gap"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SimplicityVerdict v = simplicity_check(points[i], pot, c, rho, sopts);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& viol : v.violations) worst = std::min(worst, viol.gap);
    t.add_row({std::to_string(i), v.passed ? "true" : "false", g17(v.eps1),
               std::to_string(v.K_size), std::to_string(v.violations.size()),
               v.violations.empty() ? "" : g17(worst)});
  }
  return t;
}

Table cmd_isosurface(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto pot = potential_from(cfg, lat);
  const auto c = constants_from(cfg);
  if (cfg.rho.empty()) throw Error("isosurface needs at least one rho");

  CoverageOptions copts;
  copts.practical_eps = cfg.practical_eps;
  copts.eps_override = cfg.eps_override;
  copts.eps1_override = cfg.eps1_override;
  copts.order_cap = cfg.order_cap;
  copts.iso.tol_scale = cfg.tol_scale;
  copts.iso.basis_radius = cfg.basis_radius;

  Table t;
  t.columns = {"rho"};
  for (int i = 1; i <= cfg.dim; ++i) t.columns.push_back("y_" + std::to_string(i));
  t.columns.insert(t.columns.end(),
                   {"lambda", "residual", "N", "steps", "tries", "found"});
  for (double rho : cfg.rho) {
    const CoverageResult r =
        band_coverage_witness(rho, pot, c, cfg.max_tries, cfg.seed, copts);
    std::vector<std::string> row{g17(rho)};
    if (r.witness) {
      for (int i = 0; i < cfg.dim; ++i) row.push_back(g17(r.witness->y.point[i]));
      row.push_back(g17(r.witness->lambda_value));
      row.push_back(g17(r.witness->residual));
      row.push_back(std::to_string(r.witness->eigen_index));
      row.push_back(std::to_string(r.witness->bisection_steps));
      row.push_back(std::to_string(r.diagnostics.tries));
      row.push_back("true");
    } else {
      for (int i = 0; i < cfg.dim + 4; ++i) row.push_back("");
      row.push_back(std::to_string(r.diagnostics.tries));
      row.push_back("false");
      std::cerr << "isosurface: no witness at rho " << rho << " (resonant "
                << r.diagnostics.drop_resonant << ", surface "
                << r.diagnostics.drop_surface << ", simplicity "
                << r.diagnostics.drop_simplicity << ", bracket "
                << r.diagnostics.drop_bracket << ", tracking "
                << r.diagnostics.drop_tracking << ")\n";
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table cmd_measure(const RunConfig& cfg) {
  const auto lat = lattice_from(cfg);
  const auto c = constants_from(cfg);
  if (cfg.rho.empty()) throw Error("measure needs at least one rho");

  Table t;
  t.columns = {"rho", "samples", "fraction", "stderr", "seed", "c8"};
  for (double rho : cfg.rho) {
    const MeasureEstimate est = measure_nonresonance_fraction(
        rho, c, lat, cfg.c8, cfg.samples, cfg.seed, cfg.threads);
    t.add_row({g17(est.rho), std::to_string(est.n_samples), g17(est.fraction),
               g17(est.stderr_value), std::to_string(est.seed), g17(cfg.c8)});
  }
  return t;
}

Table cmd_validate(const RunConfig& cfg, bool& all_passed) {
  AcceptanceOptions opts;
  opts.threads = cfg.threads;
  opts.log = &std::cerr;
  const auto results = run_acceptance(opts);
  Table t;
  t.columns = {"criterion", "name", "passed", "seconds", "detail"};
  all_passed = true;
  for (const auto& r : results) {
    all_passed = all_passed && r.passed;
    t.add_row({std::to_string(r.id), r.name, r.passed ? "PASS" : "FAIL",
               g17(r.seconds), r.detail});
  }
  return t;
}

}  // namespace

int run_command(const RunConfig& cfg) {
  try {
    bool validate_passed = true;
    Table table;
    if (cfg.command == "constants") table = cmd_constants(cfg);
    else if (cfg.command == "classify") table = cmd_classify(cfg);
    else if (cfg.command == "solve") table = cmd_solve(cfg);
    else if (cfg.command == "expand") table = cmd_expand(cfg);
    else if (cfg.command == "resonance") table = cmd_resonance(cfg);
    else if (cfg.command == "blochfn") table = cmd_blochfn(cfg);
    else if (cfg.command == "simplicity") table = cmd_simplicity(cfg);
    else if (cfg.command == "isosurface") table = cmd_isosurface(cfg);
    else if (cfg.command == "measure") table = cmd_measure(cfg);
    else if (cfg.command == "validate") table = cmd_validate(cfg, validate_passed);
    else throw Error("unknown command '" + cfg.command + "'");

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.output.empty()) {
      file.open(cfg.output);
      if (!file) throw Error("cannot open output file '" + cfg.output + "'");
      out = &file;
    }
    if (cfg.format == "json")
      write_json(*out, table, cfg.command);
    else
      write_csv(*out, table);

    if (cfg.command == "validate" && !validate_passed) return 2;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace blochasym
