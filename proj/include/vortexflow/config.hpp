#pragma once

// Experiment configuration: a flat dotted-key schema (grid.*, group.*, init.*,
// flow.*, analysis.*, output.*) parsed from plain-text files of `key = value`
// lines and from command-line overrides.  Unknown keys are rejected so that a
// typo cannot silently fall back to a default.

#include <cstdint>
#include <string>
#include <vector>

#include "vortexflow/fields.hpp"
#include "vortexflow/flow.hpp"
#include "vortexflow/lattice.hpp"

namespace vortexflow {

struct ExperimentConfig {
  // grid.*
  int nx = 16;
  int ny = 16;
  double lx = 1.0;
  double ly = 1.0;

  // group.*  (weights is the k x n integer matrix, row-major; rows may be
  // separated by ';' in the config value, but only the flat list matters)
  int k = 1;
  std::vector<int> weights{1};
  std::vector<double> tau{0.0};
  std::vector<int> degrees{0};

  // init.*
  std::string init_kind = "constant";  // random | constant | vortex-ansatz | file
  bool has_seed = false;
  std::uint64_t seed = 0;
  double amplitude = 1.0;
  std::string init_file;  // required when init_kind == "file"

  // flow.*
  std::string scheme = "semi-implicit";  // explicit-euler | rk4 | semi-implicit
  std::string functional = "moment";     // moment | ymh
  double dt0 = 1e-2;
  double dt_max = 0.25;  // splitting stability often needs <= 0.1 for deep tolerances
  double dt_grow = 1.2;
  double tmax = 100.0;
  double tol = 1e-8;
  int snapshot_every = 0;

  // analysis.*
  int rays = 8;
  bool loj_fit = false;
  bool has_uniqueness_seed = false;
  std::uint64_t uniqueness_gauge_seed = 0;

  // output.*
  std::string out_dir = "out";
  std::string snapshot_format = "binary";  // binary | csv

  // Derived accessors; each validates and throws ConfigError on bad input.
  int n_components() const;
  TorusGrid make_grid() const;
  ActionSpec make_spec() const;
  FlowConfig make_flow_config() const;
  Pair make_initial() const;

  // Full-config validation (cross-field constraints).
  void validate() const;
};

// Assign one dotted key.  Throws ConfigError for unknown keys or malformed
// values.
void config_set(ExperimentConfig& cfg, const std::string& key,
                const std::string& value);

// Parse a config file of `key = value` lines ('#' starts a comment, blank
// lines ignored) on top of `cfg`.  Throws ConfigError on syntax or schema
// errors, IoError if the file cannot be read.
void parse_config_file(ExperimentConfig& cfg, const std::string& path);

// Apply a `key=value` override string (the --set form).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

Scheme parse_scheme(const std::string& token);
FlowFunctional parse_functional(const std::string& token);

}  // namespace vortexflow
