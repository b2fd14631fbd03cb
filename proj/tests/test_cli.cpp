#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "vortexflow/config.hpp"
#include "vortexflow/runner.hpp"
#include "vortexflow/snapshot.hpp"
#include "vortexflow/util.hpp"

using namespace vortexflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::path("test_tmp") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig quick_cfg(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.nx = cfg.ny = 8;
  cfg.tau = {1.0};
  cfg.init_kind = "random";
  cfg.has_seed = true;
  cfg.seed = 31;
  cfg.amplitude = 0.7;
  cfg.dt0 = 0.05;
  cfg.dt_max = 0.1;  // inside the splitting stability range, so tol is reachable
  cfg.tmax = 120.0;
  cfg.tol = 1e-9;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("config files parse values, comments, and lists") {
  fs::path dir = fresh_dir("cfg");
  fs::path file = dir / "a.cfg";
  {
    std::ofstream out(file);
    out << "# leading comment\n"
        << "grid.nx = 24\n"
        << "grid.ly = 2.5   # trailing comment\n"
        << "group.k = 2\n"
        << "group.weights = 1 0 ; 1 -1\n"
        << "group.tau = 0.5, -0.25\n"
        << "group.degrees = 1 0\n"
        << "\n"
        << "init.kind = random\n"
        << "init.seed = 42\n"
        << "flow.scheme = rk4\n"
        << "flow.dt_max = 0.125\n"
        << "flow.dt_grow = 1.5\n"
        << "analysis.loj_fit = true\n";
  }
  ExperimentConfig cfg;
  parse_config_file(cfg, file.string());
  CHECK(cfg.nx == 24);
  CHECK(cfg.ly == 2.5);
  CHECK(cfg.k == 2);
  CHECK(cfg.weights == std::vector<int>{1, 0, 1, -1});
  CHECK(cfg.n_components() == 2);
  CHECK(cfg.tau == std::vector<double>{0.5, -0.25});
  CHECK(cfg.seed == 42);
  CHECK(cfg.loj_fit);
  cfg.validate();
  FlowConfig fc = cfg.make_flow_config();
  CHECK(fc.scheme == Scheme::RK4);
  CHECK(fc.dt_max == 0.125);
  CHECK(fc.dt_grow == 1.5);
}

TEST_CASE("config rejects unknown keys, bad syntax, and bad values") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(config_set(cfg, "grid.nz", "8"), ConfigError);
  CHECK_THROWS_AS(config_set(cfg, "grid.nx", "eight"), ConfigError);
  CHECK_THROWS_AS(config_set(cfg, "analysis.loj_fit", "maybe"), ConfigError);

  ExperimentConfig caps;
  caps.dt0 = 0.05;
  caps.dt_max = 0.004;  // cap below the initial step
  CHECK_THROWS_AS(caps.make_flow_config(), ConfigError);
  caps.dt_max = 0.25;
  caps.dt_grow = 0.5;
  CHECK_THROWS_AS(caps.make_flow_config(), ConfigError);

  fs::path dir = fresh_dir("cfg_bad");
  fs::path file = dir / "bad.cfg";
  {
    std::ofstream out(file);
    out << "grid.nx 16\n";
  }
  ExperimentConfig c2;
  CHECK_THROWS_AS(parse_config_file(c2, file.string()), ConfigError);
  CHECK_THROWS_AS(parse_config_file(c2, (dir / "missing.cfg").string()), IoError);
}

TEST_CASE("config overrides use dotted key=value assignments") {
  ExperimentConfig cfg;
  apply_override(cfg, "grid.nx=32");
  apply_override(cfg, "output.dir = results");
  CHECK(cfg.nx == 32);
  CHECK(cfg.out_dir == "results");
  CHECK_THROWS_AS(apply_override(cfg, "grid.nx"), ConfigError);
}

TEST_CASE("random initial data requires a seed") {
  ExperimentConfig cfg;
  cfg.init_kind = "random";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(cfg.make_initial(), ConfigError);
  cfg.has_seed = true;
  cfg.seed = 7;
  cfg.validate();
}

TEST_CASE("scheme tokens: leapfrog is rejected at flow-config build") {
  ExperimentConfig cfg;
  cfg.scheme = "leapfrog";
  CHECK_THROWS_AS(cfg.make_flow_config(), ConfigError);
  CHECK_THROWS_AS(parse_functional("energy"), ConfigError);
  CHECK(parse_scheme("explicit-euler") == Scheme::ExplicitEuler);
  CHECK(parse_functional("ymh") == FlowFunctional::Ymh);
}

TEST_CASE("snapshots round-trip bit-exactly in both formats") {
  // take a few flow steps so every stored field is nontrivial
  ExperimentConfig cfg = quick_cfg("unused");
  cfg.tmax = 0.3;
  cfg.tol = 0;
  FlowResult r = run_flow(initial_state(cfg), cfg.make_flow_config());
  const FlowState& st = r.state;

  fs::path dir = fresh_dir("snap");
  for (bool binary : {true, false}) {
    fs::path p = dir / (binary ? "s.bin" : "s.txt");
    save_snapshot(p.string(), st, binary);
    FlowState back = load_snapshot(p.string());
    CHECK(back.t == st.t);
    CHECK(back.dt == st.dt);
    CHECK(back.kn == st.kn);
    CHECK(back.x.grid() == st.x.grid());
    CHECK(back.x.action() == st.x.action());
    CHECK(back.s.v == st.s.v);
    CHECK(back.x.A.a.vx == st.x.A.a.vx);
    CHECK(back.x.A.a.vy == st.x.A.a.vy);
    CHECK(back.x.u.u.v == st.x.u.u.v);
  }
}

TEST_CASE("snapshot loader rejects damaged files") {
  fs::path dir = fresh_dir("snap_bad");
  CHECK_THROWS_AS(load_snapshot((dir / "absent.snap").string()), IoError);

  fs::path junk = dir / "junk.snap";
  std::ofstream(junk) << "not a snapshot at all";
  CHECK_THROWS_AS(load_snapshot(junk.string()), IoError);

  // truncate a valid binary snapshot
  ExperimentConfig cfg = quick_cfg("unused");
  cfg.tmax = 0.1;
  cfg.tol = 0;
  FlowState st = run_flow(initial_state(cfg), cfg.make_flow_config()).state;
  fs::path good = dir / "good.snap";
  save_snapshot(good.string(), st, true);
  std::string bytes = slurp(good);
  fs::path cut = dir / "cut.snap";
  std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(load_snapshot(cut.string()), IoError);
}

TEST_CASE("run pipeline writes timeseries, report, and final snapshot") {
  fs::path dir = fresh_dir("run");
  ExperimentConfig cfg = quick_cfg((dir / "out").string());
  RunOutcome out = run_experiment(cfg);
  CHECK(out.exit_code == 0);
  CHECK(out.result.status == FlowStatus::Converged);

  const std::string csv = slurp(out.timeseries_path);
  CHECK(csv.rfind("t,ymh,f_moment,dbar_resid,phi_l2,sup_u2,kn_value\n", 0) == 0);

  auto rep = nlohmann::json::parse(slurp(out.report_path));
  CHECK(rep["status"] == "converged");
  CHECK(rep["exit_code"] == 0);
  CHECK(rep["phi_l2"].get<double>() <= 2e-9);

  FlowState fin = load_snapshot(out.final_snapshot_path);
  CHECK(fin.t == out.result.state.t);
}

TEST_CASE("periodic snapshots appear at the configured cadence") {
  fs::path dir = fresh_dir("cadence");
  ExperimentConfig cfg = quick_cfg((dir / "out").string());
  cfg.tmax = 0.5;
  cfg.tol = 0;
  cfg.snapshot_every = 4;
  RunOutcome out = run_experiment(cfg);
  CHECK(out.result.steps >= 4);
  long expect = out.result.steps / 4;
  long found = 0;
  for (auto& e : fs::directory_iterator(dir / "out"))
    if (e.path().filename().string().rfind("snapshot_", 0) == 0) ++found;
  CHECK(found == expect);
}

TEST_CASE("identical configs give byte-identical outputs") {
  fs::path dir = fresh_dir("det");
  ExperimentConfig a = quick_cfg((dir / "a").string());
  ExperimentConfig b = quick_cfg((dir / "b").string());
  RunOutcome ra = run_experiment(a);
  RunOutcome rb = run_experiment(b);
  CHECK(slurp(ra.timeseries_path) == slurp(rb.timeseries_path));
  CHECK(slurp(ra.report_path) == slurp(rb.report_path));
  CHECK(slurp(ra.final_snapshot_path) == slurp(rb.final_snapshot_path));
}

TEST_CASE("a run resumed from its checkpoint matches the straight run") {
  fs::path dir = fresh_dir("resume");
  ExperimentConfig leg1 = quick_cfg((dir / "leg1").string());
  // dyadic fixed step: leg boundaries land exactly and both runs take
  // identical steps, so agreement is at round-off level
  leg1.dt0 = 1.0 / 64;
  leg1.dt_max = 1.0 / 64;
  leg1.dt_grow = 1.0;
  leg1.tmax = 1.0;
  leg1.tol = 0;

  FlowResult r1 = run_flow(initial_state(leg1), leg1.make_flow_config());
  CHECK(r1.state.t == 1.0);
  fs::path ckpt = dir / "ckpt.snap";
  save_snapshot(ckpt.string(), r1.state, true);

  ExperimentConfig leg2 = leg1;
  leg2.init_kind = "file";
  leg2.init_file = ckpt.string();
  leg2.tmax = 2.0;
  FlowResult r2 = run_flow(initial_state(leg2), leg2.make_flow_config());
  CHECK(r2.t_begin == 1.0);

  ExperimentConfig full = leg1;
  full.tmax = 2.0;
  FlowResult rs = run_flow(initial_state(full), full.make_flow_config());

  CHECK(vtest::sup_diff(r2.state.x, rs.state.x) <= 1e-12);
  CHECK(std::abs(r2.state.kn - rs.state.kn) <= 1e-12);
}

TEST_CASE("resume validates the config against the checkpoint") {
  fs::path dir = fresh_dir("resume_bad");
  ExperimentConfig cfg = quick_cfg((dir / "out").string());
  cfg.tmax = 0.1;
  cfg.tol = 0;
  FlowState st = run_flow(initial_state(cfg), cfg.make_flow_config()).state;
  fs::path ckpt = dir / "ckpt.snap";
  save_snapshot(ckpt.string(), st, true);

  ExperimentConfig other = cfg;
  other.init_kind = "file";
  other.init_file = ckpt.string();
  other.nx = 16;  // disagrees with the checkpoint
  CHECK_THROWS_AS(initial_state(other), ConfigError);
}

TEST_CASE("exit codes map flow outcomes and status tokens") {
  CHECK(status_exit_code(FlowStatus::Converged) == 0);
  CHECK(status_exit_code(FlowStatus::MaxTimeReached) == 2);
  CHECK(status_exit_code(FlowStatus::Stalled) == 2);
  CHECK(status_exit_code(FlowStatus::BlowUp) == 3);
  CHECK(status_token(FlowStatus::Converged) == "converged");
  CHECK(status_token(FlowStatus::BlowUp) == "blow-up");
}
