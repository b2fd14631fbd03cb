#include "vortexflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vortexflow/util.hpp"

namespace vortexflow {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

long long parse_i64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long out = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(key + ": expected integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(key + ": expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_f64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError(key + ": expected number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected boolean, got '" + v + "'");
}

// Split on spaces, commas, and semicolons (semicolons separate matrix rows in
// group.weights; the flat row-major list is what gets stored).
std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ' ' || c == '\t' || c == ',' || c == ';') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split_list(v))
    out.push_back(static_cast<int>(parse_i64(key, tok)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split_list(v)) out.push_back(parse_f64(key, tok));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

}  // namespace

Scheme parse_scheme(const std::string& token) {
  if (token == "explicit-euler") return Scheme::ExplicitEuler;
  if (token == "rk4") return Scheme::RK4;
  if (token == "semi-implicit") return Scheme::SemiImplicit;
  throw ConfigError("flow.scheme: unknown scheme '" + token +
                    "' (expected explicit-euler, rk4, or semi-implicit)");
}

FlowFunctional parse_functional(const std::string& token) {
  if (token == "moment") return FlowFunctional::Moment;
  if (token == "ymh") return FlowFunctional::Ymh;
  throw ConfigError("flow.functional: unknown functional '" + token +
                    "' (expected moment or ymh)");
}

void config_set(ExperimentConfig& cfg, const std::string& key,
                const std::string& value) {
  if (key == "grid.nx") cfg.nx = static_cast<int>(parse_i64(key, value));
  else if (key == "grid.ny") cfg.ny = static_cast<int>(parse_i64(key, value));
  else if (key == "grid.lx") cfg.lx = parse_f64(key, value);
  else if (key == "grid.ly") cfg.ly = parse_f64(key, value);
  else if (key == "group.k") cfg.k = static_cast<int>(parse_i64(key, value));
  else if (key == "group.weights") cfg.weights = parse_int_list(key, value);
  else if (key == "group.tau") cfg.tau = parse_double_list(key, value);
  else if (key == "group.degrees") cfg.degrees = parse_int_list(key, value);
  else if (key == "init.kind") cfg.init_kind = trim(value);
  else if (key == "init.seed") { cfg.seed = parse_u64(key, value); cfg.has_seed = true; }
  else if (key == "init.amplitude") cfg.amplitude = parse_f64(key, value);
  else if (key == "init.file") cfg.init_file = trim(value);
  else if (key == "flow.scheme") cfg.scheme = trim(value);
  else if (key == "flow.functional") cfg.functional = trim(value);
  else if (key == "flow.dt0") cfg.dt0 = parse_f64(key, value);
  else if (key == "flow.dt_max") cfg.dt_max = parse_f64(key, value);
  else if (key == "flow.dt_grow") cfg.dt_grow = parse_f64(key, value);
  else if (key == "flow.tmax") cfg.tmax = parse_f64(key, value);
  else if (key == "flow.tol") cfg.tol = parse_f64(key, value);
  else if (key == "flow.snapshot_every")
    cfg.snapshot_every = static_cast<int>(parse_i64(key, value));
  else if (key == "analysis.rays") cfg.rays = static_cast<int>(parse_i64(key, value));
  else if (key == "analysis.loj_fit") cfg.loj_fit = parse_bool(key, value);
  else if (key == "analysis.uniqueness_gauge_seed") {
    cfg.uniqueness_gauge_seed = parse_u64(key, value);
    cfg.has_uniqueness_seed = true;
  } else if (key == "output.dir") cfg.out_dir = trim(value);
  else if (key == "output.snapshot_format") cfg.snapshot_format = trim(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void parse_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    try {
      config_set(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value, got '" + assignment + "'");
  config_set(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

int ExperimentConfig::n_components() const {
  if (k < 1) throw ConfigError("group.k must be >= 1");
  if (weights.empty() || weights.size() % static_cast<size_t>(k) != 0)
    throw ConfigError("group.weights: size " + std::to_string(weights.size()) +
                      " is not a multiple of group.k = " + std::to_string(k));
  return static_cast<int>(weights.size() / static_cast<size_t>(k));
}

TorusGrid ExperimentConfig::make_grid() const {
  if (lx <= 0 || ly <= 0) throw ConfigError("grid.lx and grid.ly must be positive");
  return TorusGrid(nx, ny, lx, ly);
}

ActionSpec ExperimentConfig::make_spec() const {
  const int n = n_components();
  if (tau.size() != static_cast<size_t>(k))
    throw ConfigError("group.tau: expected " + std::to_string(k) + " entries, got " +
                      std::to_string(tau.size()));
  if (degrees.size() != static_cast<size_t>(k))
    throw ConfigError("group.degrees: expected " + std::to_string(k) +
                      " entries, got " + std::to_string(degrees.size()));
  return ActionSpec(k, n, weights, tau, degrees);
}

FlowConfig ExperimentConfig::make_flow_config() const {
  FlowConfig fc;
  fc.scheme = parse_scheme(scheme);
  fc.functional = parse_functional(functional);
  if (dt0 <= 0) throw ConfigError("flow.dt0 must be positive");
  if (dt_max < dt0) throw ConfigError("flow.dt_max must be >= flow.dt0");
  if (dt_grow < 1.0) throw ConfigError("flow.dt_grow must be >= 1");
  if (tmax <= 0) throw ConfigError("flow.tmax must be positive");
  if (tol < 0) throw ConfigError("flow.tol must be nonnegative");
  if (snapshot_every < 0) throw ConfigError("flow.snapshot_every must be >= 0");
  fc.dt0 = dt0;
  fc.dt_max = dt_max;
  fc.dt_grow = dt_grow;
  fc.t_max = tmax;
  fc.grad_tol = tol;
  fc.snapshot_every = snapshot_every;
  return fc;
}

Pair ExperimentConfig::make_initial() const {
  const TorusGrid g = make_grid();
  const ActionSpec spec = make_spec();
  if (init_kind == "constant") return constant_pair(g, spec, cdouble(amplitude, 0.0));
  if (init_kind == "vortex-ansatz") return vortex_ansatz(g, spec, amplitude);
  if (init_kind == "random") {
    if (!has_seed)
      throw ConfigError("init.seed is required when init.kind = random");
    return random_pair(g, spec, seed, amplitude);
  }
  if (init_kind == "file")
    throw ConfigError("init.kind = file is resolved by the runner, not the config");
  throw ConfigError("init.kind: unknown kind '" + init_kind +
                    "' (expected random, constant, vortex-ansatz, or file)");
}

void ExperimentConfig::validate() const {
  make_grid();
  make_spec();
  make_flow_config();
  if (init_kind != "random" && init_kind != "constant" &&
      init_kind != "vortex-ansatz" && init_kind != "file")
    throw ConfigError("init.kind: unknown kind '" + init_kind + "'");
  if (init_kind == "random" && !has_seed)
    throw ConfigError("init.seed is required when init.kind = random");
  if (init_kind == "file" && init_file.empty())
    throw ConfigError("init.file is required when init.kind = file");
  if (snapshot_format != "binary" && snapshot_format != "csv")
    throw ConfigError("output.snapshot_format must be binary or csv");
  if (rays < 0) throw ConfigError("analysis.rays must be >= 0");
  if (out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

}  // namespace vortexflow
