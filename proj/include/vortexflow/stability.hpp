#pragma once
// Stability analysis: weights of one-parameter destabilizing rays, the
// Kempf-Ness functional along gauge paths and geodesic rays, the sharp
// moment-weight inequality check, classification of flow limits, and the
// uniqueness-of-limits comparison across complexified-gauge translates.
#include <string>
#include <utility>
#include <vector>

#include "vortexflow/flow.hpp"

namespace vortexflow {

// Limit of <Phi(exp(i t xi).x), xi> as t -> infinity.  Along the ray this
// quantity is nondecreasing (its t-derivative is |codiff2 avg_sp xi|^2 plus a
// sum of squares), so the sampled increments over geometrically growing steps
// either shrink to zero (finite weight) or eventually grow (infinite weight).
enum class WeightKind { Finite, Infinite, Inconclusive };

struct WeightResult {
  WeightKind kind = WeightKind::Inconclusive;
  double value = 0;         // the limit if Finite; otherwise the last finite
                            // sample, which is always a lower bound for w
  double slope = 0;         // last increment per unit t (diagnostic)
  double err_estimate = 0;  // last increment: bounds |value - limit| if Finite
  bool mu_bounded = true;   // sup-norm of mu stayed under the divergence cap
  double mu_sup_max = 0;    // largest sup-norm of mu seen on the ray
  std::vector<std::pair<double, double>> samples;  // (t, <Phi(x_t), xi>)
};

WeightResult weight(const Pair& x, const RealSite& xi, double t_max = 60.0,
                    double rel_tol = 1e-10, double div_cap = 1e10);

// Sup-norm growth of the moment map along the ray exp(i t xi).x; evidence
// probe for coercivity of the moment map on orbit closures.
struct MomentGrowth {
  bool bounded = true;  // stayed under the divergence cap
  bool grew = false;    // rose well above its initial size
  double sup_begin = 0, sup_end = 0, sup_max = 0;
};
MomentGrowth moment_growth_probe(const Pair& x, const RealSite& xi,
                                 double t_max = 60.0, double div_cap = 1e10);

// Kempf-Ness value along the geodesic ray exp(i t xi).x at uniformly spaced
// times m*dt, m = 0..steps, by trapezoid quadrature of <Phi(x_t), xi>;
// normalized to 0 at t = 0.  Second differences of the returned sequence are
// nonnegative up to rounding because the integrand is nondecreasing.
std::vector<double> kn_along_ray(const Pair& x, const RealSite& xi, double dt,
                                 int steps);

// Kempf-Ness value accumulated along a recorded gauge path starting at the
// identity: trapezoid sum of 1/2 (<Phi(x_m), ds> + <Phi(x_{m+1}), ds>) with
// ds the increment of the non-compact part (the compact part does not move
// the value), states rebuilt from x0.  Returns the partial values.
std::vector<double> kempf_ness_series(const Pair& x0,
                                      const std::vector<ComplexGauge>& path);
std::vector<double> kempf_ness_series(const Pair& x0,
                                      const std::vector<RealSite>& s_path);
double kempf_ness(const Pair& x0, const std::vector<RealSite>& s_path);

// Sharp moment-weight inequality -w(x,xi)/|xi| <= inf over the orbit of
// |Phi|, with the right side approximated by the terminal |Phi| of the flow
// started at x.  Throws ViolationDetected when the bound fails beyond tol.
// Infinite weights pass vacuously.  For the dominant direction the two sides
// agree; eq_gap reports |lhs - rhs| for that check.
struct MomentWeightReport {
  bool lhs_finite = true;  // false when the weight is +infinity
  double lhs = 0;          // -w/|xi| (or an upper bound for it)
  double rhs = 0;          // terminal |Phi|
  double slack = 0;        // rhs - lhs
  double eq_gap = 0;       // |rhs - lhs|
  WeightResult w;
};
MomentWeightReport moment_weight_check(const Pair& x, const RealSite& xi,
                                       double terminal_phi, double tol = 2e-3);

// L*L on gauge directions: laplacian(xi) + pointwise W diag(|u|^2) W^T xi.
// Exposed for cross-checking against the composition of the infinitesimal
// action with its adjoint.
RealSite lsl_apply(const Pair& x, const RealSite& xi);

// Smallest eigenvalue of L*L by inverse power iteration (inner solves by
// preconditioned conjugate gradients).  Zero iff a gauge direction fixes the
// configuration.
double sigma_min_lsl(const Pair& x, int outer_iters = 30, double shift = 1e-8);

// Closed-form restriction of the L*L quadratic form to constant gauge
// directions: lambda_min( sum_j m_j W_j W_j^T )/vol with m_j = integral
// |u_j|^2.  Upper bound for sigma_min_lsl; vanishes iff L*L has kernel.
double stabilizer_gap(const Pair& x);

struct ClassifyTols {
  double crit_tol = 1e-7;   // stationarity residual ceiling (x10 slack)
  double phi_tol = 1e-5;    // |Phi| above this means a nonzero-level limit
  double drift_tol = 1e-3;  // gauge drift over the trailing dyadic span
  double stab_tol = 1e-6;   // smallest-eigenvalue threshold
};

struct Classification {
  std::string verdict;  // "stable" | "polystable" | "semistable-only" | "unstable"
  double phi_norm = 0;
  double crit_residual = 0;  // max of |d0 Phi| and |<W_j,Phi> u_j|
  double gauge_drift = 0;    // |s(T) - s(T/2)|
  double sigma_min = 0;      // smallest eigenvalue of L*L at the limit
};

// Decision tree on a finished flow: stationarity check (throws NotCritical),
// then |Phi| > phi_tol with a settled level -> unstable, with a still-sinking
// level -> semistable-only (the orbit never reaches the zero level); at the
// zero level an order-one gauge drift -> semistable-only, else sigma_min of
// L*L separates stable from polystable.
Classification classify_limit(const FlowResult& r, const ClassifyTols& tols = {});

// Flows x0 and g.x0 with the same configuration and compares the
// gauge-invariant observables of the two limits pointwise after optimal
// torus-translation alignment: per-component |u_j|^2, site-centered
// curvature, moment residual, energy density.  Runs the two flows
// concurrently when VORTEXFLOW_THREADS >= 2.
struct UniquenessReport {
  double u2_dev = 0;
  double curv_dev = 0;
  double phi_dev = 0;
  double density_dev = 0;
  double max_obs_dev = 0;   // max of the four sup-norm deviations
  double phi_norm_dev = 0;  // | |Phi_1| - |Phi_2| |
  int shift_i = 0, shift_j = 0;  // alignment chosen on the |u|^2 observable
  FlowStatus status1 = FlowStatus::MaxTimeReached;
  FlowStatus status2 = FlowStatus::MaxTimeReached;
};

UniquenessReport ness_uniqueness(const Pair& initial, const ComplexGauge& g,
                                 const FlowConfig& cfg);

}  // namespace vortexflow
