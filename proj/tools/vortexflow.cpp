// vortexflow: command-line driver for the torus vortex-flow laboratory.
//
// Subcommands:
//   run         gradient-flow experiment from a config file
//   weights     ray weights w(x, xi) of the configured initial point
//   classify    flow to the limit and classify its stability type
//   uniqueness  compare limits from gauge-equivalent starts
//   finitedim   finite-dimensional toy-model operations (no lattice)
//   lojfit      Lojasiewicz decay fit of a recorded timeseries.csv
//
// All subcommands accept --config FILE and repeatable --set key=value
// overrides using the dotted config schema.  Exit codes: 0 success (for run:
// converged), 2 stopped short of convergence (time budget exhausted or step
// size underflow), 3 blow-up, 64 configuration error, 74 I/O error, 1 any
// other failure.

#include <cstdio>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vortexflow/config.hpp"
#include "vortexflow/finitedim.hpp"
#include "vortexflow/runner.hpp"
#include "vortexflow/snapshot.hpp"
#include "vortexflow/stability.hpp"
#include "vortexflow/util.hpp"

using nlohmann::json;
using namespace vortexflow;

namespace {

std::vector<double> parse_reals(const std::string& what, const std::string& s) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    double v = 0;
    auto [p, ec] = std::from_chars(cur.data(), cur.data() + cur.size(), v);
    if (ec != std::errc{} || p != cur.data() + cur.size())
      throw ConfigError(what + ": bad number '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t')
      flush();
    else
      cur.push_back(c);
  }
  flush();
  return out;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& sets) {
  ExperimentConfig cfg;
  if (!path.empty()) parse_config_file(cfg, path);
  for (const auto& s : sets) apply_override(cfg, s);
  return cfg;
}

void write_json_file(const std::string& dir, const std::string& name,
                     const json& j) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failure on '" + path + "'");
  std::printf("wrote %s\n", path.c_str());
}

const char* kind_token(WeightKind k) {
  switch (k) {
    case WeightKind::Finite: return "finite";
    case WeightKind::Infinite: return "infinite";
    case WeightKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

RealSite constant_direction(const TorusGrid& g, int k, int comp, double value) {
  RealSite xi(g, k);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) xi.at(i, j, comp) = value;
  return xi;
}

int cmd_run(const ExperimentConfig& cfg) {
  RunOutcome out = run_experiment(cfg);
  const FlowResult& r = out.result;
  std::printf("status %s after %ld steps (%ld rejects), t = %.6g\n",
              status_token(r.status).c_str(), r.steps, r.rejects, r.state.t);
  if (!r.series.empty()) {
    const SeriesPoint& p = r.series.back();
    std::printf("ymh %.10g  f_moment %.10g  |Phi| %.10g  sup|u|^2 %.10g\n",
                p.ymh, p.f_moment, p.phi_l2, p.sup_u2);
  }
  std::printf("grad_norm %.4g\n", r.grad_norm);
  std::printf("outputs: %s, %s, %s\n", out.timeseries_path.c_str(),
              out.report_path.c_str(), out.final_snapshot_path.c_str());
  return out.exit_code;
}

int cmd_weights(const ExperimentConfig& cfg, const std::string& xi_arg,
                double ray_tmax) {
  cfg.validate();
  Pair x = initial_state(cfg).x;
  const TorusGrid& g = x.grid();
  const int k = x.action().k;

  std::vector<std::pair<std::string, RealSite>> rays;
  if (!xi_arg.empty()) {
    auto vals = parse_reals("--xi", xi_arg);
    if (vals.size() != static_cast<size_t>(k))
      throw ConfigError("--xi: expected " + std::to_string(k) + " entries");
    RealSite xi(g, k);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        for (int a = 0; a < k; ++a) xi.at(i, j, a) = vals[a];
    rays.emplace_back("custom", std::move(xi));
  } else {
    for (int a = 0; a < k; ++a) {
      rays.emplace_back("e" + std::to_string(a) + "+",
                        constant_direction(g, k, a, 1.0));
      rays.emplace_back("e" + std::to_string(a) + "-",
                        constant_direction(g, k, a, -1.0));
    }
    for (int r = 0; r < cfg.rays; ++r)
      rays.emplace_back("random" + std::to_string(r),
                        random_site(g, k, 1000 + r, 1.0, 2, 7000));
  }

  json out;
  out["rays"] = json::array();
  std::printf("%-10s %-13s %14s %12s %8s\n", "ray", "kind", "value", "err",
              "mu-grew");
  for (const auto& [label, xi] : rays) {
    WeightResult w = weight(x, xi, ray_tmax);
    MomentGrowth mg = moment_growth_probe(x, xi, ray_tmax);
    std::printf("%-10s %-13s %14.6g %12.3g %8s\n", label.c_str(),
                kind_token(w.kind), w.value, w.err_estimate,
                mg.grew ? "yes" : "no");
    out["rays"].push_back({{"label", label},
                           {"kind", kind_token(w.kind)},
                           {"value", w.value},
                           {"slope", w.slope},
                           {"err_estimate", w.err_estimate},
                           {"mu_bounded", w.mu_bounded},
                           {"mu_sup_max", w.mu_sup_max},
                           {"mu_grew", mg.grew}});
  }
  write_json_file(cfg.out_dir, "weights.json", out);
  return 0;
}

int cmd_classify(const ExperimentConfig& cfg, const ClassifyTols& tols) {
  cfg.validate();
  FlowResult r = run_flow(initial_state(cfg), cfg.make_flow_config());
  Classification c = classify_limit(r, tols);
  std::printf("verdict: %s\n", c.verdict.c_str());
  std::printf("|Phi| %.6g  crit_residual %.4g  gauge_drift %.4g  sigma_min %.4g\n",
              c.phi_norm, c.crit_residual, c.gauge_drift, c.sigma_min);
  json out{{"verdict", c.verdict},
           {"phi_norm", c.phi_norm},
           {"crit_residual", c.crit_residual},
           {"gauge_drift", c.gauge_drift},
           {"sigma_min", c.sigma_min},
           {"flow_status", status_token(r.status)},
           {"steps", r.steps},
           {"t_final", r.state.t}};
  write_json_file(cfg.out_dir, "classify.json", out);
  return 0;
}

int cmd_uniqueness(const ExperimentConfig& cfg, std::uint64_t seed_flag,
                   bool seed_given, double gauge_amplitude) {
  cfg.validate();
  std::uint64_t seed = cfg.uniqueness_gauge_seed;
  if (seed_given)
    seed = seed_flag;
  else if (!cfg.has_uniqueness_seed)
    throw ConfigError(
        "uniqueness needs analysis.uniqueness_gauge_seed or --gauge-seed");
  Pair x0 = initial_state(cfg).x;
  ComplexGauge g = random_gauge(x0.grid(), x0.action().k, seed, gauge_amplitude);
  UniquenessReport rep = ness_uniqueness(x0, g, cfg.make_flow_config());
  std::printf("flow status: %s / %s\n", status_token(rep.status1).c_str(),
              status_token(rep.status2).c_str());
  std::printf("sup deviations after shift (%d,%d):\n", rep.shift_i, rep.shift_j);
  std::printf("  |u|^2 %.4g  curvature %.4g  Phi %.4g  density %.4g\n",
              rep.u2_dev, rep.curv_dev, rep.phi_dev, rep.density_dev);
  std::printf("  max %.4g   | |Phi_1|-|Phi_2| | = %.4g\n", rep.max_obs_dev,
              rep.phi_norm_dev);
  json out{{"u2_dev", rep.u2_dev},
           {"curv_dev", rep.curv_dev},
           {"phi_dev", rep.phi_dev},
           {"density_dev", rep.density_dev},
           {"max_obs_dev", rep.max_obs_dev},
           {"phi_norm_dev", rep.phi_norm_dev},
           {"shift_i", rep.shift_i},
           {"shift_j", rep.shift_j},
           {"gauge_seed", seed},
           {"status1", status_token(rep.status1)},
           {"status2", status_token(rep.status2)}};
  write_json_file(cfg.out_dir, "uniqueness.json", out);
  return 0;
}

fd::CVec parse_point(const ActionSpec& spec, const std::string& x_arg) {
  fd::CVec x(static_cast<size_t>(spec.n), cdouble(0, 0));
  if (x_arg.empty()) return x;
  auto vals = parse_reals("--x", x_arg);
  if (vals.size() != 2 * static_cast<size_t>(spec.n))
    throw ConfigError("--x: expected " + std::to_string(2 * spec.n) +
                      " reals (re,im pairs)");
  for (int j = 0; j < spec.n; ++j)
    x[j] = cdouble(vals[2 * j], vals[2 * j + 1]);
  return x;
}

int cmd_finitedim(const ExperimentConfig& cfg, const std::string& op,
                  const std::string& x_arg, const std::string& xi_arg,
                  int grid, double tol, double dt0, double tmax,
                  double flow_tol, double ray_tmax) {
  const ActionSpec spec = cfg.make_spec();
  const fd::CVec x = parse_point(spec, x_arg);
  json out{{"op", op}};

  if (op == "dominant") {
    fd::FdDominant d = fd::fd_dominant_weight_bruteforce(spec, x, grid, tol);
    std::printf("dominant direction (value %.10g):\n  xi =", d.value);
    for (double v : d.xi) std::printf(" %.10g", v);
    std::printf("\n");
    out["xi"] = d.xi;
    out["value"] = d.value;
  } else if (op == "flow") {
    fd::FdFlowConfig fc;
    fc.dt0 = dt0;
    fc.t_max = tmax;
    fc.grad_tol = flow_tol;
    fd::FdFlowResult r = fd::fd_flow(spec, x, fc);
    std::printf("%s at t = %.6g: F = %.10g, |grad| = %.4g, |x|^2 = %.10g\n",
                r.converged ? "converged" : "stopped", r.t, r.value,
                r.grad_norm, fd::fd_norm(r.x) * fd::fd_norm(r.x));
    std::printf("  xi =");
    for (double v : r.xi) std::printf(" %.10g", v);
    std::printf("\n");
    json xre = json::array(), xim = json::array();
    for (const cdouble& z : r.x) {
      xre.push_back(z.real());
      xim.push_back(z.imag());
    }
    out["x_re"] = xre;
    out["x_im"] = xim;
    out["value"] = r.value;
    out["grad_norm"] = r.grad_norm;
    out["xi"] = r.xi;
    out["converged"] = r.converged;
    out["steps"] = r.steps;
    out["t"] = r.t;
  } else if (op == "weight") {
    if (xi_arg.empty()) throw ConfigError("finitedim --op weight needs --xi");
    auto xi = parse_reals("--xi", xi_arg);
    if (xi.size() != static_cast<size_t>(spec.k))
      throw ConfigError("--xi: expected " + std::to_string(spec.k) + " entries");
    fd::FdWeight w = fd::fd_weight(spec, x, xi);
    out["finite"] = w.finite;
    if (w.finite) {
      const double ray = fd::fd_weight_ray(spec, x, xi, ray_tmax);
      std::printf("w = %.12g (closed form), %.12g (ray limit), diff %.3g\n",
                  w.value, ray, std::abs(w.value - ray));
      out["value"] = w.value;
      out["ray_value"] = ray;
    } else {
      std::printf("w = +infinity\n");
    }
  } else {
    throw ConfigError("finitedim --op must be dominant, flow, or weight");
  }
  write_json_file(cfg.out_dir, "finitedim.json", out);
  return 0;
}

int cmd_lojfit(const std::string& csv_path, const std::string& column,
               double f_inf_flag, bool f_inf_given, const std::string& json_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open '" + csv_path + "'");
  std::string header;
  if (!std::getline(in, header)) throw IoError("'" + csv_path + "' is empty");
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  int t_idx = -1, f_idx = -1;
  for (size_t m = 0; m < cols.size(); ++m) {
    if (cols[m] == "t") t_idx = static_cast<int>(m);
    if (cols[m] == column) f_idx = static_cast<int>(m);
  }
  if (t_idx < 0) throw ConfigError("'" + csv_path + "' has no 't' column");
  if (f_idx < 0)
    throw ConfigError("'" + csv_path + "' has no '" + column + "' column");

  std::vector<double> t, f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ','))
      row.push_back(parse_reals("csv cell", cell).at(0));
    if (row.size() != cols.size())
      throw IoError("'" + csv_path + "': ragged row");
    t.push_back(row[t_idx]);
    f.push_back(row[f_idx]);
  }
  if (f.empty()) throw InsufficientDecay("'" + csv_path + "' has no data rows");
  const double f_inf = f_inf_given ? f_inf_flag : f.back();

  LojFit fit = lojasiewicz_fit(t, f, f_inf);
  std::printf("model %s  gamma %.6g  rate %.6g  r2 %.8g  points %d\n",
              fit.exponential ? "exponential" : "power", fit.gamma, fit.rate,
              fit.r2, fit.points);
  if (!json_path.empty()) {
    json out{{"column", column},
             {"f_inf", f_inf},
             {"gamma", fit.gamma},
             {"r2", fit.r2},
             {"rate", fit.rate},
             {"model", fit.exponential ? "exponential" : "power"},
             {"points", fit.points}};
    std::ofstream jf(json_path, std::ios::trunc);
    if (!jf) throw IoError("cannot open '" + json_path + "' for writing");
    jf << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torus vortex-flow laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file of key = value lines");
    sub->add_option("--set", sets, "override, key=value (repeatable)");
  };

  auto* run = app.add_subcommand("run", "run a gradient-flow experiment");
  add_common(run);

  auto* weights = app.add_subcommand("weights", "ray weights of the initial point");
  add_common(weights);
  std::string xi_arg;
  double ray_tmax = 60.0;
  weights->add_option("--xi", xi_arg, "constant direction, k comma-separated values");
  weights->add_option("--ray-tmax", ray_tmax, "ray parameter horizon");

  auto* classify = app.add_subcommand("classify", "flow to the limit and classify");
  add_common(classify);
  ClassifyTols tols;
  classify->add_option("--crit-tol", tols.crit_tol, "stationarity residual ceiling");
  classify->add_option("--phi-tol", tols.phi_tol, "|Phi| zero-level threshold");
  classify->add_option("--drift-tol", tols.drift_tol, "gauge-drift threshold");
  classify->add_option("--stab-tol", tols.stab_tol, "sigma_min threshold");

  auto* uniq = app.add_subcommand("uniqueness",
                                  "compare limits from gauge-equivalent starts");
  add_common(uniq);
  std::uint64_t gauge_seed = 0;
  double gauge_amplitude = 0.5;
  auto* seed_opt = uniq->add_option("--gauge-seed", gauge_seed,
                                    "seed for the random complexified gauge");
  uniq->add_option("--gauge-amplitude", gauge_amplitude, "gauge field amplitude");

  auto* fdim = app.add_subcommand("finitedim", "finite-dimensional toy model");
  add_common(fdim);
  std::string op = "dominant", x_arg, fd_xi_arg;
  int fd_grid = 720;
  double fd_tol = 1e-9, fd_dt0 = 0.05, fd_tmax = 400.0, fd_flow_tol = 1e-12,
         fd_ray_tmax = 40.0;
  fdim->add_option("--op", op, "dominant | flow | weight");
  fdim->add_option("--x", x_arg, "point in C^n as 2n reals (re,im pairs)");
  fdim->add_option("--xi", fd_xi_arg, "direction, k reals");
  fdim->add_option("--grid", fd_grid, "direction-search resolution");
  fdim->add_option("--tol", fd_tol, "dominant-search tolerance");
  fdim->add_option("--dt0", fd_dt0, "flow initial step");
  fdim->add_option("--tmax", fd_tmax, "flow time horizon");
  fdim->add_option("--flow-tol", fd_flow_tol, "flow gradient tolerance");
  fdim->add_option("--ray-tmax", fd_ray_tmax, "ray horizon for weight check");

  auto* loj = app.add_subcommand("lojfit", "decay-rate fit of a timeseries.csv");
  std::string csv_path, column = "ymh", loj_json;
  double f_inf = 0.0;
  loj->add_option("csv", csv_path, "timeseries.csv path")->required();
  loj->add_option("--column", column, "column to fit (default ymh)");
  auto* finf_opt = loj->add_option("--f-inf", f_inf,
                                   "limit value (default: last sample)");
  loj->add_option("--json", loj_json, "also write the fit as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    if (run->parsed()) return cmd_run(load_config(config_path, sets));
    if (weights->parsed())
      return cmd_weights(load_config(config_path, sets), xi_arg, ray_tmax);
    if (classify->parsed())
      return cmd_classify(load_config(config_path, sets), tols);
    if (uniq->parsed())
      return cmd_uniqueness(load_config(config_path, sets), gauge_seed,
                            seed_opt->count() > 0, gauge_amplitude);
    if (fdim->parsed())
      return cmd_finitedim(load_config(config_path, sets), op, x_arg, fd_xi_arg,
                           fd_grid, fd_tol, fd_dt0, fd_tmax, fd_flow_tol,
                           fd_ray_tmax);
    if (loj->parsed())
      return cmd_lojfit(csv_path, column, f_inf, finf_opt->count() > 0,
                        loj_json);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 64;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 74;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
