#pragma once
// Periodic 2-D lattice: grid geometry, node/link/plaquette fields, discrete
// exterior calculus with exact adjoints, and an FFT Poisson solver.
//
// Conventions (fixed; everything downstream differentiates these exactly):
//   sites    (i,j)                i in [0,nx), j in [0,ny), spacing hx, hy
//   x-links  from (i,j) to (i+1,j); y-links from (i,j) to (i,j+1)
//   plaquettes with corners (i..i+1, j..j+1)
//   d0: forward-difference gradient (sites -> links)
//   d1: discrete curl (links -> plaquettes), d1(a) = dx(a_y) - dy(a_x)
//   codiff  = adjoint of d0 under the measure-weighted inner products
//   codiff2 = adjoint of d1
//   avg_sp  = 4-corner average (sites -> plaquettes); avg_ps = its adjoint
//   rot90   = symmetric staggered quarter-turn on link fields, normalized so
//             rot90(d0 f) = -codiff2(avg_sp f) exactly
//   laplacian = codiff .. d0 (positive semidefinite)
// All inner products carry the cell measure hx*hy and reduce by pairwise
// (binary-tree) summation for run-to-run determinism.
#include <cassert>
#include <complex>
#include <memory>
#include <vector>

#include "vortexflow/util.hpp"

namespace vortexflow {

using cdouble = std::complex<double>;

struct TorusGrid {
  int nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0;

  TorusGrid() = default;
  TorusGrid(int nx_, int ny_, double lx_, double ly_)
      : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 4 || ny < 4) throw ConfigError("TorusGrid: need nx, ny >= 4");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("TorusGrid: need lx, ly > 0");
  }

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double area() const { return hx() * hy(); }   // one cell
  double vol() const { return lx * ly; }        // whole torus
  int sites() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  int xp(int i) const { return i + 1 == nx ? 0 : i + 1; }
  int xm(int i) const { return i == 0 ? nx - 1 : i - 1; }
  int yp(int j) const { return j + 1 == ny ? 0 : j + 1; }
  int ym(int j) const { return j == 0 ? ny - 1 : j - 1; }
  bool operator==(const TorusGrid& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
  }
};

namespace detail {
template <class T>
struct Field2D {
  TorusGrid g;
  int comps = 1;
  std::vector<T> v;

  Field2D() = default;
  Field2D(const TorusGrid& g_, int comps_)
      : g(g_), comps(comps_), v(static_cast<size_t>(g_.sites()) * comps_, T{}) {
    assert(comps_ >= 1);
  }
  T& at(int i, int j, int c) { return v[(static_cast<size_t>(g.idx(i, j))) * comps + c]; }
  const T& at(int i, int j, int c) const {
    return v[(static_cast<size_t>(g.idx(i, j))) * comps + c];
  }
  size_t size() const { return v.size(); }
};
}  // namespace detail

// Values attached to lattice sites (k real components or n complex ones).
template <class T>
struct SiteField : detail::Field2D<T> {
  SiteField() = default;
  SiteField(const TorusGrid& g, int comps) : detail::Field2D<T>(g, comps) {}
};

// Values attached to plaquettes (indexed by their lower-left corner).
template <class T>
struct PlaquetteField : detail::Field2D<T> {
  PlaquetteField() = default;
  PlaquetteField(const TorusGrid& g, int comps) : detail::Field2D<T>(g, comps) {}
};

// Values attached to links; vx on x-links, vy on y-links.
template <class T>
struct LinkField {
  TorusGrid g;
  int comps = 1;
  std::vector<T> vx, vy;

  LinkField() = default;
  LinkField(const TorusGrid& g_, int comps_)
      : g(g_), comps(comps_),
        vx(static_cast<size_t>(g_.sites()) * comps_, T{}),
        vy(static_cast<size_t>(g_.sites()) * comps_, T{}) {}
  T& x(int i, int j, int c) { return vx[(static_cast<size_t>(g.idx(i, j))) * comps + c]; }
  const T& x(int i, int j, int c) const {
    return vx[(static_cast<size_t>(g.idx(i, j))) * comps + c];
  }
  T& y(int i, int j, int c) { return vy[(static_cast<size_t>(g.idx(i, j))) * comps + c]; }
  const T& y(int i, int j, int c) const {
    return vy[(static_cast<size_t>(g.idx(i, j))) * comps + c];
  }
  size_t size() const { return vx.size() + vy.size(); }
};

using RealSite = SiteField<double>;
using RealLink = LinkField<double>;
using RealPlaq = PlaquetteField<double>;
using CSite = SiteField<cdouble>;

// ---- discrete exterior calculus -------------------------------------------

template <class T>
LinkField<T> d0(const SiteField<T>& f) {
  LinkField<T> out(f.g, f.comps);
  const auto& g = f.g;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < f.comps; ++c) {
        out.x(i, j, c) = (f.at(g.xp(i), j, c) - f.at(i, j, c)) * ihx;
        out.y(i, j, c) = (f.at(i, g.yp(j), c) - f.at(i, j, c)) * ihy;
      }
  return out;
}

template <class T>
PlaquetteField<T> d1(const LinkField<T>& a) {
  PlaquetteField<T> out(a.g, a.comps);
  const auto& g = a.g;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < a.comps; ++c)
        out.at(i, j, c) = (a.y(g.xp(i), j, c) - a.y(i, j, c)) * ihx -
                          (a.x(i, g.yp(j), c) - a.x(i, j, c)) * ihy;
  return out;
}

// Adjoint of d0: <d0 f, a>_link = <f, codiff a>_site.
template <class T>
SiteField<T> codiff(const LinkField<T>& a) {
  SiteField<T> out(a.g, a.comps);
  const auto& g = a.g;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < a.comps; ++c)
        out.at(i, j, c) = -((a.x(i, j, c) - a.x(g.xm(i), j, c)) * ihx +
                            (a.y(i, j, c) - a.y(i, g.ym(j), c)) * ihy);
  return out;
}

// Adjoint of d1: <d1 a, p>_plaq = <a, codiff2 p>_link.
template <class T>
LinkField<T> codiff2(const PlaquetteField<T>& p) {
  LinkField<T> out(p.g, p.comps);
  const auto& g = p.g;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < p.comps; ++c) {
        out.x(i, j, c) = (p.at(i, j, c) - p.at(i, g.ym(j), c)) * ihy;
        out.y(i, j, c) = -(p.at(i, j, c) - p.at(g.xm(i), j, c)) * ihx;
      }
  return out;
}

// 4-corner average, sites -> plaquettes (second-order at plaquette centers).
template <class T>
PlaquetteField<T> avg_sp(const SiteField<T>& f) {
  PlaquetteField<T> out(f.g, f.comps);
  const auto& g = f.g;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < f.comps; ++c)
        out.at(i, j, c) = 0.25 * (f.at(i, j, c) + f.at(g.xp(i), j, c) +
                                  f.at(i, g.yp(j), c) + f.at(g.xp(i), g.yp(j), c));
  return out;
}

// Adjoint of avg_sp: the average of the four plaquettes meeting a site.
template <class T>
SiteField<T> avg_ps(const PlaquetteField<T>& p) {
  SiteField<T> out(p.g, p.comps);
  const auto& g = p.g;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < p.comps; ++c)
        out.at(i, j, c) = 0.25 * (p.at(i, j, c) + p.at(g.xm(i), j, c) +
                                  p.at(i, g.ym(j), c) + p.at(g.xm(i), g.ym(j), c));
  return out;
}

// Symmetric staggered quarter-turn on link fields.  Normalization fixed by
// rot90(d0 f) = -codiff2(avg_sp f); this is the discrete symplectic rotation
// used in the moment-map pairing.
template <class T>
LinkField<T> rot90(const LinkField<T>& b) {
  LinkField<T> out(b.g, b.comps);
  const auto& g = b.g;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < b.comps; ++c) {
        out.x(i, j, c) = -0.25 * (b.y(i, j, c) + b.y(g.xp(i), j, c) +
                                  b.y(i, g.ym(j), c) + b.y(g.xp(i), g.ym(j), c));
        out.y(i, j, c) = 0.25 * (b.x(i, j, c) + b.x(g.xm(i), j, c) +
                                 b.x(i, g.yp(j), c) + b.x(g.xm(i), g.yp(j), c));
      }
  return out;
}

template <class T>
SiteField<T> laplacian(const SiteField<T>& f) {
  return codiff(d0(f));
}

// ---- inner products and norms ---------------------------------------------
// Real inner products (for complex payloads: Re sum z conj(w)), weighted by
// the cell area, reduced pairwise.

namespace detail {
inline double prod_re(double a, double b) { return a * b; }
inline double prod_re(const cdouble& a, const cdouble& b) {
  return a.real() * b.real() + a.imag() * b.imag();
}
template <class T>
double inner_buf(const std::vector<T>& a, const std::vector<T>& b) {
  assert(a.size() == b.size());
  std::vector<double> prod(a.size());
  for (size_t m = 0; m < a.size(); ++m) prod[m] = prod_re(a[m], b[m]);
  return pairwise_sum(prod);
}
}  // namespace detail

template <class T>
double inner(const SiteField<T>& a, const SiteField<T>& b) {
  assert(a.g == b.g && a.comps == b.comps);
  return a.g.area() * detail::inner_buf(a.v, b.v);
}
template <class T>
double inner(const PlaquetteField<T>& a, const PlaquetteField<T>& b) {
  assert(a.g == b.g && a.comps == b.comps);
  return a.g.area() * detail::inner_buf(a.v, b.v);
}
template <class T>
double inner(const LinkField<T>& a, const LinkField<T>& b) {
  assert(a.g == b.g && a.comps == b.comps);
  return a.g.area() * (detail::inner_buf(a.vx, b.vx) + detail::inner_buf(a.vy, b.vy));
}

template <class F>
double l2norm(const F& a) {
  return std::sqrt(inner(a, a));
}

// Component-wise mean over sites (no measure factor; plain average).
std::vector<double> mean(const RealSite& f);

// Integral over the torus of each component: sum * cell area.
std::vector<double> integral(const RealSite& f);
std::vector<double> integral(const RealPlaq& f);

// ---- linear field arithmetic ----------------------------------------------

template <class F>
F& axpy(F& y, double alpha, const F& x);  // y += alpha*x, defined per type below

template <class T>
SiteField<T>& axpy(SiteField<T>& y, double alpha, const SiteField<T>& x) {
  assert(y.g == x.g && y.comps == x.comps);
  for (size_t m = 0; m < y.v.size(); ++m) y.v[m] += alpha * x.v[m];
  return y;
}
template <class T>
PlaquetteField<T>& axpy(PlaquetteField<T>& y, double alpha, const PlaquetteField<T>& x) {
  assert(y.g == x.g && y.comps == x.comps);
  for (size_t m = 0; m < y.v.size(); ++m) y.v[m] += alpha * x.v[m];
  return y;
}
template <class T>
LinkField<T>& axpy(LinkField<T>& y, double alpha, const LinkField<T>& x) {
  assert(y.g == x.g && y.comps == x.comps);
  for (size_t m = 0; m < y.vx.size(); ++m) y.vx[m] += alpha * x.vx[m];
  for (size_t m = 0; m < y.vy.size(); ++m) y.vy[m] += alpha * x.vy[m];
  return y;
}

template <class F>
F& scale(F& y, double alpha);
template <class T>
SiteField<T>& scale(SiteField<T>& y, double alpha) {
  for (auto& z : y.v) z *= alpha;
  return y;
}
template <class T>
PlaquetteField<T>& scale(PlaquetteField<T>& y, double alpha) {
  for (auto& z : y.v) z *= alpha;
  return y;
}
template <class T>
LinkField<T>& scale(LinkField<T>& y, double alpha) {
  for (auto& z : y.vx) z *= alpha;
  for (auto& z : y.vy) z *= alpha;
  return y;
}

// ---- spectral solves (FFTW) ------------------------------------------------

// Eigenvalue of `laplacian` on the plane wave exp(2*pi*I*(p*i/nx + q*j/ny)).
double lap_eigenvalue(const TorusGrid& g, int p, int q);

// Cached FFT plans for one grid; used by the Poisson solver and the
// semi-implicit integrator.  Not copyable; create once per run.
struct Spectral {
  explicit Spectral(const TorusGrid& g);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  TorusGrid g;

  // Solve laplacian(f) = rho with mean(f)=0; rho must have (near-)zero mean.
  RealSite poisson(const RealSite& rho) const;

  // x <- (I + coef*laplacian)^{-1} x, component-wise (coef >= 0).
  void implicit_helmholtz(SiteField<cdouble>& x, double coef) const;
  void implicit_helmholtz(RealSite& x, double coef) const;

  // a <- (I + coef*M)^{-1} a where M = codiff2 avg_sp avg_ps d1 (with_avg)
  // or M = codiff2 d1 (!with_avg).  Rank-one per Fourier mode.
  void implicit_curlcurl(RealLink& a, double coef, bool with_avg) const;

  // f <- (I + coef*L)^{-1} f where L = avg_ps d1 codiff2 avg_sp, the
  // site-space operator governing how a gauge increment moves the averaged
  // curvature.  Diagonal per Fourier mode, component-wise (coef >= 0).
  void implicit_site_curlcurl(RealSite& f, double coef) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl;
  void fwd(std::vector<cdouble>& buf) const;
  void bwd(std::vector<cdouble>& buf) const;  // unnormalized
};

// One-shot convenience wrapper around Spectral::poisson.
RealSite solve_poisson(const RealSite& rho);

}  // namespace vortexflow
