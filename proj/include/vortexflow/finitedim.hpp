#pragma once
// Finite-dimensional model: T^k acting linearly on C^n with the same weight
// data as the field theory but no lattice.  Everything here is small enough
// to verify by brute force: closed-form weights, exhaustive search for the
// dominant destabilizing direction, the Lyapunov-Schmidt reduced potential at
// a critical point, and direct sampling of gradient-inequality exponents.
#include <cstdint>
#include <vector>

#include "vortexflow/fields.hpp"

namespace vortexflow {
namespace fd {

using Vec = std::vector<double>;    // length k
using CVec = std::vector<cdouble>;  // length n

// mu_a(x) = 1/2 sum_j W_aj |x_j|^2 - tau_a.
Vec fd_moment(const ActionSpec& spec, const CVec& x);

// F(x) = 1/2 |mu(x)|^2, grad F_j = <W_j, mu> x_j, and the Hessian of F as a
// real-linear map on C^n.
double fd_value(const ActionSpec& spec, const CVec& x);
CVec fd_grad(const ActionSpec& spec, const CVec& x);
CVec fd_hess_apply(const ActionSpec& spec, const CVec& x, const CVec& d);

double fd_norm(const CVec& x);

struct FdFlowConfig {
  double dt0 = 0.05;
  double dt_min = 1e-14;
  double dt_max = 0.5;
  double dt_grow = 1.2;
  double t_max = 400.0;
  double grad_tol = 1e-12;
  long max_steps = 10000000;
  bool adaptive = true;  // false: fixed dt0, no backtracking (cross-checks)
};

struct FdSample {
  double t = 0, value = 0, grad_norm = 0;
};

struct FdFlowResult {
  CVec x;      // final point
  Vec s;       // accumulated tracker, d/dt s = -mu
  Vec xi;      // -mu(x_final): the asymptotic direction of the flow
  double t = 0;
  double value = 0;
  double grad_norm = 0;
  long steps = 0;
  bool converged = false;  // false = partial report at t_max / stall
  std::vector<FdSample> series;
};

// RK4 negative gradient flow of F with monotone backtracking, plus the
// tracker d/dt s = -mu integrated with the same stages.
FdFlowResult fd_flow(const ActionSpec& spec, const CVec& x0,
                     const FdFlowConfig& cfg = {});

// Closed-form weight of the ray exp(i t xi).x: +infinity if some coordinate
// with x_j != 0 has <W_j, xi> > 0; otherwise <mu(x+), xi> where x+ keeps
// exactly the coordinates with <W_j, xi> = 0.  (For x = 0 this is -<tau,xi>.)
struct FdWeight {
  bool finite = true;
  double value = 0;  // meaningful when finite
};
FdWeight fd_weight(const ActionSpec& spec, const CVec& x, const Vec& xi);

// Numeric ray limit of <mu(exp(i t xi).x), xi> for cross-checking the closed
// form; evaluates at t_max directly (the limit is reached exponentially).
double fd_weight_ray(const ActionSpec& spec, const CVec& x, const Vec& xi,
                     double t_max = 40.0);

// Maximizes -w(x, xi)/|xi| over the unit sphere |xi| = 1 by grid search plus
// local descent.  Throws NotUnstable when every sampled finite weight is
// >= -tol (no destabilizing direction exists among the probes).
struct FdDominant {
  Vec xi;           // maximizer on the unit sphere
  double value = 0; // -w(x, xi*) = the maximized instability
};
FdDominant fd_dominant_weight_bruteforce(const ActionSpec& spec, const CVec& x,
                                         int grid = 720, double tol = 1e-9);

// Lyapunov-Schmidt reduction at a critical point x_c of F: split C^n (as a
// real vector space) into K = ker Hess F(x_c) and its complement W' from the
// eigendecomposition; for y in K solve the corrector grad F(x_c + y + phi)
// perpendicular to W' ... i.e. the W'-projection of the gradient vanishes,
// phi in W', by Newton.  The reduced potential is f(y) = F(x_c + y + phi(y))
// and its derivative in kernel directions equals the full gradient at the
// corrected point.
struct FdReduced {
  CVec x_c;
  std::vector<CVec> kernel;  // orthonormal basis of K (real structure)
  std::vector<CVec> range;   // orthonormal basis of W'
  Vec evals;                 // all 2n Hessian eigenvalues, ascending
};
// Throws NotCritical if |grad F(x_c)| > 1e-10 and RankAmbiguous when a
// Hessian eigenvalue falls inside (rank_tol/10, rank_tol*10).
FdReduced fd_reduced_setup(const ActionSpec& spec, const CVec& x_c,
                           double rank_tol = 1e-8);
// Corrected point on the reduced slice at kernel coordinates y (length =
// kernel size); out_phi (optional) receives the corrector.  Throws
// NewtonDiverged if the corrector iteration fails.
CVec fd_reduced_point(const ActionSpec& spec, const FdReduced& red, const Vec& y,
                      CVec* out_phi = nullptr, int max_newton = 50);
// f(y) and df(y) expressed in kernel coordinates (the derivative identity:
// df(y)_b = Re<K_b, grad F(x_c + y + phi)>).
double fd_reduced_value(const ActionSpec& spec, const FdReduced& red, const Vec& y);
Vec fd_reduced_grad(const ActionSpec& spec, const FdReduced& red, const Vec& y);

// Exponent fit for |grad F| >= C |F - F(x_c)|^gamma near a critical point:
// samples shells around x_c, regresses log|grad F| on log|F - F(x_c)|, and
// returns the largest constant valid on all samples.  Throws
// DegenerateSamples when a shell carries no usable variation and
// ViolationDetected if the fitted exponent reaches 1.
struct FdLoj {
  double gamma = 0;
  double constant = 0;
  double r2 = 0;
  int samples = 0;
};
FdLoj fd_lojasiewicz_probe(const ActionSpec& spec, const CVec& x_c,
                           double r_lo = 1e-4, double r_hi = 1e-2,
                           int shells = 12, int per_shell = 64,
                           uint64_t seed = 77);

}  // namespace fd
}  // namespace vortexflow
