#pragma once
// Geometric state on the torus: torus-group action data on C^n, connections
// in a fixed degree sector, sections with the matching seam cocycle, unitary
// and complexified gauge transformations, moment map and residual.
//
// Degree sector: the background connection is A_bg = (0, beta_a * x) with
// beta_a = 2*pi*deg_a/vol, realized analytically; the stored link field `a`
// is the periodic fluctuation.  Crossing the +x seam multiplies section
// component j by exp(-i<W_j,beta> lx y); the y seam is trivial.  Plaquette
// transport then equals exp(i<W_j,beta> hx hy) on every plaquette, seam
// included, and the total flux is 2*pi*deg exactly.
//
// Matter transport uses link exponentials, so unitary gauge equivariance of
// curvature, covariant differences and the moment residual is exact (not a
// discretization statement).
#include <vector>

#include "vortexflow/lattice.hpp"
#include "vortexflow/rng.hpp"

namespace vortexflow {

// Linear torus-group action data: T^k acting on C^n with integer weight
// matrix W (k x n, row-major), moment-map offsets tau, bundle degrees.
struct ActionSpec {
  int k = 1, n = 1;
  std::vector<int> W;         // W[a*n + j]
  std::vector<double> tau;    // size k
  std::vector<int> degrees;   // size k

  ActionSpec() : W{1}, tau{0.0}, degrees{0} {}
  ActionSpec(int k_, int n_, std::vector<int> W_, std::vector<double> tau_,
             std::vector<int> degrees_);

  int w(int a, int j) const { return W[static_cast<size_t>(a) * n + j]; }
  // <W_j, xi> for xi given as k contiguous doubles.
  double wdot(int j, const double* xi) const {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += W[static_cast<size_t>(a) * n + j] * xi[a];
    return s;
  }
  // Numerical coercivity probe for the moment map: samples max_a |mu_a| on
  // growing spheres and reports whether it grows with the radius.
  bool moment_proper(double radius = 32.0, int samples = 256) const;
  bool operator==(const ActionSpec& o) const {
    return k == o.k && n == o.n && W == o.W && tau == o.tau && degrees == o.degrees;
  }
};

// Constant background flux density beta_a = 2*pi*deg_a / vol.
std::vector<double> background_flux_density(const ActionSpec& spec, const TorusGrid& g);

// Connection in the degree sector: full A = background + periodic fluctuation a.
struct Connection {
  TorusGrid g;
  ActionSpec spec;
  RealLink a;  // comps = k

  Connection() = default;
  Connection(const TorusGrid& g_, const ActionSpec& spec_)
      : g(g_), spec(spec_), a(g_, spec_.k) {}
};

// Section of the associated C^n bundle, stored on the fundamental domain.
// The seam cocycle is implied by (W, degrees, grid) and checked at
// construction (corner transport must be single-valued).
struct Section {
  TorusGrid g;
  ActionSpec spec;
  CSite u;  // comps = n

  Section() = default;
  Section(const TorusGrid& g_, const ActionSpec& spec_);
};

// A configuration (A, u); members must share grid and action data.
struct Pair {
  Connection A;
  Section u;

  Pair() = default;
  Pair(Connection A_, Section u_);
  Pair(const TorusGrid& g, const ActionSpec& spec) : A(g, spec), u(g, spec) {}
  const TorusGrid& grid() const { return A.g; }
  const ActionSpec& action() const { return A.spec; }
};

// Tangent vector at a pair: (link direction for A, site direction for u).
struct TangentPair {
  RealLink a;   // comps = k
  CSite u;      // comps = n

  TangentPair() = default;
  TangentPair(const TorusGrid& g, const ActionSpec& spec)
      : a(g, spec.k), u(g, spec.n) {}
};

double inner(const TangentPair& x, const TangentPair& y);
double l2norm(const TangentPair& x);
TangentPair& axpy(TangentPair& y, double alpha, const TangentPair& x);
TangentPair& scale(TangentPair& y, double alpha);

// Complexified gauge transformation exp(<W_j,s> + i <W_j,theta>) acting on u,
// a -> a - d0(theta) + codiff2(avg_sp(s)).  Composition is addition.
struct ComplexGauge {
  RealSite s;      // comps = k (imaginary/radial direction)
  RealSite theta;  // comps = k (compact direction)

  ComplexGauge() = default;
  ComplexGauge(const TorusGrid& g, int k) : s(g, k), theta(g, k) {}
};

ComplexGauge compose(const ComplexGauge& g2, const ComplexGauge& g1);  // g2 after g1
ComplexGauge inverse(const ComplexGauge& g);

// Plaquette curvature *F = d1(a) + beta and its site-centered average.
RealPlaq curvature(const Connection& A);
RealSite curvature_site(const Connection& A);

// Moment map mu_a(u) = 1/2 sum_j W_aj |u_j|^2 - tau_a, per site.
RealSite moment(const Section& u);

// Moment residual Phi = avg_ps(d1 a) + beta + mu(u)  (site-centered, k comps).
struct MomentResidual {
  RealSite phi;  // comps = k
};
MomentResidual moment_residual(const Pair& x);

// Unitary link transporters per section component (n comps).  The x value at
// (i,j) maps the fiber at (i+1,j) to the fiber at (i,j) and includes the seam
// transition phase on the last column; the y value includes the background
// connection term.
LinkField<cdouble> link_transporters(const Pair& x);

// Forward (link-based) covariant difference; component j of the x part at
// (i,j) is (T u_j(i+1,j) - u_j(i,j))/hx with link transporter T.
LinkField<cdouble> covariant_d(const Pair& x);
LinkField<cdouble> covariant_d(const Pair& x, const LinkField<cdouble>& T);

// Centered covariant differences at sites (second-order), used only by the
// (0,1)-residual diagnostic.
struct CenteredD {
  CSite dx, dy;  // comps = n
};
CenteredD covariant_d_centered(const Pair& x);

// Discrete (0,1)-part 1/2 (D_x - i D_y) u with centered covariant
// differences; vanishing residual characterizes gauged holomorphic pairs.
CSite dbar_residual(const Pair& x);

// Real infinitesimal action L_xi = (-d0 xi, i <W_j,xi> u_j).
TangentPair infinitesimal_action(const Pair& x, const RealSite& xi);

// Adjoint of the infinitesimal action: <L xi, t> = <xi, L^T t>.
RealSite infinitesimal_action_adjoint(const Pair& x, const TangentPair& t);

// Derivative of the complexified action in the i*g direction:
// d/dt|_0 exp(i t xi).(A,u) = (codiff2(avg_sp xi), <W_j,xi> u_j).
TangentPair complexified_action_i(const Pair& x, const RealSite& xi);

// Apply a complexified gauge transformation.
Pair apply_complex_gauge(const ComplexGauge& gc, const Pair& x);

// Point on the geodesic ray exp(i t xi).(A,u).
Pair ray_point(const Pair& x, const RealSite& xi, double t);

// ---- initializers ----------------------------------------------------------

// Gaussian-comb holomorphic ansatz in the given degree sector; components
// whose effective degree <W_j,deg> is negative are set to zero, zero-degree
// components are constant.  a = 0.
Pair vortex_ansatz(const TorusGrid& g, const ActionSpec& spec, double amplitude);

// Smooth random fields: low-mode Fourier synthesis with counter-based
// Gaussian coefficients and spectral decay; deterministic in (seed).
Pair random_pair(const TorusGrid& g, const ActionSpec& spec, uint64_t seed,
                 double amplitude, int mmax = 3);
RealSite random_site(const TorusGrid& g, int comps, uint64_t seed, double amplitude,
                     int mmax = 3, uint64_t stream0 = 900);
ComplexGauge random_gauge(const TorusGrid& g, int k, uint64_t seed, double amplitude,
                          int mmax = 2);

// u_j = value for all j, a = 0.
Pair constant_pair(const TorusGrid& g, const ActionSpec& spec, cdouble value);

}  // namespace vortexflow
