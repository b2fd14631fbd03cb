#pragma once

// Experiment driver: builds the initial state from a config (including resume
// from a checkpoint), runs the gradient flow, and writes the output artifacts
// (timeseries.csv, report.json, periodic and final snapshots) into output.dir.

#include <string>
#include <vector>

#include "vortexflow/config.hpp"
#include "vortexflow/flow.hpp"

namespace vortexflow {

struct RunOutcome {
  int exit_code = 0;
  FlowResult result;
  std::string timeseries_path;
  std::string report_path;
  std::string final_snapshot_path;
};

// Initial flow state for a config; init.kind = file loads the checkpoint and
// requires the config's grid/group data to match it.
FlowState initial_state(const ExperimentConfig& cfg);

// Full pipeline; throws ConfigError/IoError for bad input or filesystem
// failure, never for flow outcomes (those map to the exit code).
RunOutcome run_experiment(const ExperimentConfig& cfg);

// Exit-code and status-token mapping shared with the CLI:
// converged -> 0, t-max/stalled -> 2, blow-up -> 3.
int status_exit_code(FlowStatus s);
std::string status_token(FlowStatus s);

// timeseries.csv writer: exactly the columns
// t,ymh,f_moment,dbar_resid,phi_l2,sup_u2,kn_value with %.17g formatting.
void write_timeseries_csv(const std::string& path,
                          const std::vector<SeriesPoint>& series);

}  // namespace vortexflow
