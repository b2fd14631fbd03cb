#include "vortexflow/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vortexflow/snapshot.hpp"
#include "vortexflow/util.hpp"

namespace vortexflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_name(long seq) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.snap", seq);
  return buf;
}

}  // namespace

int status_exit_code(FlowStatus s) {
  switch (s) {
    case FlowStatus::Converged: return 0;
    case FlowStatus::MaxTimeReached: return 2;
    case FlowStatus::Stalled: return 2;
    case FlowStatus::BlowUp: return 3;
  }
  return 1;
}

std::string status_token(FlowStatus s) {
  switch (s) {
    case FlowStatus::Converged: return "converged";
    case FlowStatus::MaxTimeReached: return "t-max";
    case FlowStatus::Stalled: return "stalled";
    case FlowStatus::BlowUp: return "blow-up";
  }
  return "unknown";
}

void write_timeseries_csv(const std::string& path,
                          const std::vector<SeriesPoint>& series) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "t,ymh,f_moment,dbar_resid,phi_l2,sup_u2,kn_value\n";
  for (const auto& p : series)
    out << fmt17(p.t) << ',' << fmt17(p.ymh) << ',' << fmt17(p.f_moment) << ','
        << fmt17(p.dbar_resid) << ',' << fmt17(p.phi_l2) << ','
        << fmt17(p.sup_u2) << ',' << fmt17(p.kn_value) << '\n';
  if (!out) throw IoError("write failure on '" + path + "'");
}

FlowState initial_state(const ExperimentConfig& cfg) {
  if (cfg.init_kind != "file") return FlowState(cfg.make_initial());
  if (cfg.init_file.empty())
    throw ConfigError("init.file is required when init.kind = file");
  FlowState st = load_snapshot(cfg.init_file);
  const TorusGrid want = cfg.make_grid();
  const ActionSpec spec = cfg.make_spec();
  if (!(st.x.grid() == want))
    throw ConfigError("init.file: snapshot grid disagrees with grid.* config");
  if (!(st.x.action() == spec))
    throw ConfigError("init.file: snapshot group data disagrees with group.* config");
  return st;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + cfg.out_dir +
                  "': " + ec.message());

  FlowState st = initial_state(cfg);
  FlowConfig fc = cfg.make_flow_config();
  const bool binary = cfg.snapshot_format == "binary";

  long seq = 0;
  if (fc.snapshot_every > 0) {
    fc.on_snapshot = [&](const FlowState& s) {
      ++seq;
      save_snapshot((fs::path(cfg.out_dir) / snapshot_name(seq)).string(), s,
                    binary);
    };
  }

  RunOutcome out;
  out.result = run_flow(std::move(st), fc);
  const FlowResult& r = out.result;

  out.final_snapshot_path = (fs::path(cfg.out_dir) / "final.snap").string();
  save_snapshot(out.final_snapshot_path, r.state, binary);

  out.timeseries_path = (fs::path(cfg.out_dir) / "timeseries.csv").string();
  write_timeseries_csv(out.timeseries_path, r.series);

  out.exit_code = status_exit_code(r.status);

  json rep;
  rep["status"] = status_token(r.status);
  rep["exit_code"] = out.exit_code;
  rep["scheme"] = cfg.scheme;
  rep["functional"] = cfg.functional;
  rep["steps"] = r.steps;
  rep["rejects"] = r.rejects;
  rep["t_begin"] = r.t_begin;
  rep["t_final"] = r.state.t;
  rep["grad_norm"] = r.grad_norm;
  rep["sup_u2_bound"] = r.sup_u2_bound;
  rep["max_u2_excess"] = r.max_u2_excess;
  rep["max_ymh_step_increase"] = r.max_ymh_step_increase;
  rep["u2_integral"] = inner(r.state.x.u.u, r.state.x.u.u);
  if (!r.series.empty()) {
    const SeriesPoint& last = r.series.back();
    rep["ymh"] = last.ymh;
    rep["f_moment"] = last.f_moment;
    rep["dbar_resid"] = last.dbar_resid;
    rep["phi_l2"] = last.phi_l2;
    rep["sup_u2"] = last.sup_u2;
    rep["kn_value"] = last.kn_value;
  }
  if (cfg.loj_fit) {
    const bool on_moment = fc.functional == FlowFunctional::Moment;
    auto t = series_column(r.series, &SeriesPoint::t);
    auto f = series_column(
        r.series, on_moment ? &SeriesPoint::f_moment : &SeriesPoint::ymh);
    const double f_inf = f.empty() ? 0.0 : f.back();
    try {
      LojFit fit = lojasiewicz_fit(t, f, f_inf);
      rep["loj_fit"] = {{"gamma", fit.gamma},
                        {"r2", fit.r2},
                        {"rate", fit.rate},
                        {"model", fit.exponential ? "exponential" : "power"},
                        {"points", fit.points}};
    } catch (const Error& e) {
      rep["loj_fit"] = {{"error", e.what()}};
    }
  }

  out.report_path = (fs::path(cfg.out_dir) / "report.json").string();
  std::ofstream jf(out.report_path, std::ios::trunc);
  if (!jf) throw IoError("cannot open '" + out.report_path + "' for writing");
  jf << rep.dump(2) << "\n";
  if (!jf) throw IoError("write failure on '" + out.report_path + "'");
  return out;
}

}  // namespace vortexflow
