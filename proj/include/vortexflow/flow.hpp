#pragma once
// Negative gradient flow integration with energy-monotone adaptive stepping,
// the complexified-gauge tracker (d/dt s = -Phi), Cartan decomposition,
// asymptotic direction extraction, and decay-rate model fitting.
#include <functional>
#include <vector>

#include "vortexflow/functionals.hpp"

namespace vortexflow {

enum class Scheme { ExplicitEuler, RK4, SemiImplicit };

// Which functional is flowed.  The moment flow moves along the complexified
// orbit exactly; the ymh flow descends the full energy.
enum class FlowFunctional { Moment, Ymh };

struct FlowState {
  Pair x;
  RealSite s;      // accumulated non-compact gauge, d/dt s = -Phi, s(0) = 0
  double t = 0.0;
  double kn = 0.0;  // accumulated Kempf-Ness value along the tracked gauge
  double dt = 0.0;  // current step (0 = take dt0 from config)

  FlowState() = default;
  explicit FlowState(Pair x0) : x(std::move(x0)), s(x.grid(), x.action().k) {}
};

struct FlowConfig {
  Scheme scheme = Scheme::SemiImplicit;
  FlowFunctional functional = FlowFunctional::Moment;
  double dt0 = 1e-2;
  double dt_min = 1e-12;
  double dt_max = 0.25;
  double dt_grow = 1.2;
  double t_max = 100.0;
  double grad_tol = 1e-10;
  long max_steps = 50000000;
  int series_stride = 1;          // record every k-th accepted step
  double monotone_slack = 1e-12;  // allowed functional increase per step
  double blowup_factor = 10.0;    // times the compact-region bound
  int snapshot_every = 0;         // accepted steps between snapshots; 0 = off
  std::function<void(const FlowState&)> on_snapshot;
};

struct SeriesPoint {
  double t = 0, ymh = 0, f_moment = 0, dbar_resid = 0, phi_l2 = 0, sup_u2 = 0,
         kn_value = 0, grad_norm = 0;
};

enum class FlowStatus { Converged, MaxTimeReached, BlowUp, Stalled };

struct FlowResult {
  FlowStatus status = FlowStatus::MaxTimeReached;
  FlowState state;  // final
  std::vector<SeriesPoint> series;
  // gauge-tracker samples at geometrically spaced times (for slope estimates)
  std::vector<std::pair<double, RealSite>> marks;
  long steps = 0, rejects = 0;
  double t_begin = 0;              // time at which this run started
  double grad_norm = 0;            // final, of the flowed functional
  double sup_u2_bound = 0;         // compact-region ceiling used for blow-up
  double max_u2_excess = 0;        // max over steps of sup|u|^2 - bound
  double max_ymh_step_increase = 0;  // largest per-accepted-step ymh increase
};

// sup|u0|^2 vs the moment-map ceiling 2 max_a tau_a / (min positive weight).
double compact_region_bound(const Pair& x0);

FlowResult run_flow(FlowState init, const FlowConfig& cfg);
FlowResult run_flow(const Pair& x0, const FlowConfig& cfg);

// The group element g(t) with x(t) = g(t)^{-1} x(0) (inverse of the
// accumulated tracker).
ComplexGauge tracked_gauge(const FlowState& st);

// g = e^{-i xi} k pointwise: xi = -s, compact part carries theta.
struct Cartan {
  RealSite xi;
  ComplexGauge compact;
};
Cartan cartan_decompose(const ComplexGauge& g);

// Estimate lim xi(t)/t from the tracker marks (difference quotients over the
// last two dyadic spans).  osc is the relative discrepancy between the two
// quotients; throws NotConverged if it exceeds the tolerances.
struct AsymptoticDirection {
  RealSite xi;
  double osc = 0;
};
AsymptoticDirection dominant_weight_estimate(const FlowResult& r, double rel_tol = 0.05,
                                             double abs_tol = 1e-3);

// Decay-model fit on a time series: choose between f - f_inf ~ C exp(-l t)
// (gamma = 1/2) and ~ C t^{-p} (gamma = (1 + 1/p)/2) by regression quality.
struct LojFit {
  double gamma = 0;
  double r2 = 0;
  double rate = 0;  // l or p of the selected model
  bool exponential = false;
  int points = 0;
};
LojFit lojasiewicz_fit(const std::vector<double>& t, const std::vector<double>& f,
                       double f_inf);

// Column extraction helper for fits and reports.
std::vector<double> series_column(const std::vector<SeriesPoint>& s,
                                  double SeriesPoint::*member);

}  // namespace vortexflow
