#include "vortexflow/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace vortexflow {

std::vector<double> mean(const RealSite& f) {
  std::vector<double> out(f.comps, 0.0);
  std::vector<double> buf(f.g.sites());
  for (int c = 0; c < f.comps; ++c) {
    for (int m = 0; m < f.g.sites(); ++m) buf[m] = f.v[static_cast<size_t>(m) * f.comps + c];
    out[c] = pairwise_sum(buf) / f.g.sites();
  }
  return out;
}

namespace {
template <class Fld>
std::vector<double> integral_impl(const Fld& f) {
  std::vector<double> out(f.comps, 0.0);
  std::vector<double> buf(f.g.sites());
  for (int c = 0; c < f.comps; ++c) {
    for (int m = 0; m < f.g.sites(); ++m) buf[m] = f.v[static_cast<size_t>(m) * f.comps + c];
    out[c] = pairwise_sum(buf) * f.g.area();
  }
  return out;
}
}  // namespace

std::vector<double> integral(const RealSite& f) { return integral_impl(f); }
std::vector<double> integral(const RealPlaq& f) { return integral_impl(f); }

double lap_eigenvalue(const TorusGrid& g, int p, int q) {
  const double ap = 2.0 * M_PI * p / g.nx, aq = 2.0 * M_PI * q / g.ny;
  return (2.0 - 2.0 * std::cos(ap)) / (g.hx() * g.hx()) +
         (2.0 - 2.0 * std::cos(aq)) / (g.hy() * g.hy());
}

struct Spectral::Impl {
  fftw_plan fw = nullptr, bw = nullptr;
  std::vector<cdouble> buf;
};

namespace {
// fftw_execute is thread-safe on distinct plans; plan creation/destruction is
// not, and concurrent flows each own a Spectral.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Spectral::Spectral(const TorusGrid& g_) : g(g_), impl(new Impl) {
  impl->buf.assign(static_cast<size_t>(g.sites()), cdouble{0.0, 0.0});
  auto* p = reinterpret_cast<fftw_complex*>(impl->buf.data());
  std::lock_guard<std::mutex> lock(plan_mutex());
  // row-major: slow index j (ny rows), fast index i (nx columns)
  impl->fw = fftw_plan_dft_2d(g.ny, g.nx, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  impl->bw = fftw_plan_dft_2d(g.ny, g.nx, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Spectral::~Spectral() {
  if (impl) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(impl->fw);
    fftw_destroy_plan(impl->bw);
  }
}

void Spectral::fwd(std::vector<cdouble>& b) const {
  std::memcpy(impl->buf.data(), b.data(), b.size() * sizeof(cdouble));
  fftw_execute(impl->fw);
  std::memcpy(b.data(), impl->buf.data(), b.size() * sizeof(cdouble));
}

void Spectral::bwd(std::vector<cdouble>& b) const {
  std::memcpy(impl->buf.data(), b.data(), b.size() * sizeof(cdouble));
  fftw_execute(impl->bw);
  std::memcpy(b.data(), impl->buf.data(), b.size() * sizeof(cdouble));
}

RealSite Spectral::poisson(const RealSite& rho) const {
  const int n = g.sites();
  RealSite out(g, rho.comps);
  std::vector<cdouble> b(static_cast<size_t>(n));
  for (int c = 0; c < rho.comps; ++c) {
    double s = 0.0;
    {
      std::vector<double> tmp(n);
      for (int m = 0; m < n; ++m) tmp[m] = rho.v[static_cast<size_t>(m) * rho.comps + c];
      s = pairwise_sum(tmp);
    }
    const double mean_val = s * g.area() / g.vol();
    if (std::abs(mean_val) > 1e-10 * std::max(l2norm(rho), 1e-300))
      throw NonZeroMean("solve_poisson: source has nonzero mean");
    for (int m = 0; m < n; ++m) b[m] = rho.v[static_cast<size_t>(m) * rho.comps + c];
    fwd(b);
    for (int q = 0; q < g.ny; ++q)
      for (int p = 0; p < g.nx; ++p) {
        const int m = q * g.nx + p;
        if (p == 0 && q == 0) { b[m] = 0.0; continue; }
        b[m] /= lap_eigenvalue(g, p, q);
      }
    bwd(b);
    const double norm = 1.0 / n;
    for (int m = 0; m < n; ++m)
      out.v[static_cast<size_t>(m) * rho.comps + c] = b[m].real() * norm;
  }
  return out;
}

void Spectral::implicit_helmholtz(SiteField<cdouble>& x, double coef) const {
  const int n = g.sites();
  std::vector<cdouble> b(static_cast<size_t>(n));
  for (int c = 0; c < x.comps; ++c) {
    for (int m = 0; m < n; ++m) b[m] = x.v[static_cast<size_t>(m) * x.comps + c];
    fwd(b);
    for (int q = 0; q < g.ny; ++q)
      for (int p = 0; p < g.nx; ++p)
        b[q * g.nx + p] /= 1.0 + coef * lap_eigenvalue(g, p, q);
    bwd(b);
    const double norm = 1.0 / n;
    for (int m = 0; m < n; ++m) x.v[static_cast<size_t>(m) * x.comps + c] = b[m] * norm;
  }
}

void Spectral::implicit_helmholtz(RealSite& x, double coef) const {
  const int n = g.sites();
  std::vector<cdouble> b(static_cast<size_t>(n));
  for (int c = 0; c < x.comps; ++c) {
    for (int m = 0; m < n; ++m) b[m] = x.v[static_cast<size_t>(m) * x.comps + c];
    fwd(b);
    for (int q = 0; q < g.ny; ++q)
      for (int p = 0; p < g.nx; ++p)
        b[q * g.nx + p] /= 1.0 + coef * lap_eigenvalue(g, p, q);
    bwd(b);
    const double norm = 1.0 / n;
    for (int m = 0; m < n; ++m)
      x.v[static_cast<size_t>(m) * x.comps + c] = b[m].real() * norm;
  }
}

void Spectral::implicit_curlcurl(RealLink& a, double coef, bool with_avg) const {
  const int n = g.sites();
  std::vector<cdouble> bx(static_cast<size_t>(n)), by(static_cast<size_t>(n));
  for (int c = 0; c < a.comps; ++c) {
    for (int m = 0; m < n; ++m) {
      bx[m] = a.vx[static_cast<size_t>(m) * a.comps + c];
      by[m] = a.vy[static_cast<size_t>(m) * a.comps + c];
    }
    fwd(bx);
    fwd(by);
    for (int q = 0; q < g.ny; ++q)
      for (int p = 0; p < g.nx; ++p) {
        const int m = q * g.nx + p;
        const double ap = 2.0 * M_PI * p / g.nx, aq = 2.0 * M_PI * q / g.ny;
        const cdouble ex{std::cos(ap), std::sin(ap)}, ey{std::cos(aq), std::sin(aq)};
        const cdouble Dx = (ex - 1.0) / g.hx(), Dy = (ey - 1.0) / g.hy();
        double m2 = 1.0;
        if (with_avg) {
          const cdouble mm = 0.25 * (1.0 + ex) * (1.0 + ey);
          m2 = std::norm(mm);
        }
        const double lam = std::norm(Dx) + std::norm(Dy);
        const double cc = coef * m2;
        // (I + cc * u r^T)^{-1} b = b - cc/(1+cc*lam) * u (r.b),
        // r = (-Dy, Dx), u = (-conj(Dy), conj(Dx)), r.u = lam.
        const cdouble rb = -Dy * bx[m] + Dx * by[m];
        const cdouble f = (cc / (1.0 + cc * lam)) * rb;
        bx[m] -= f * (-std::conj(Dy));
        by[m] -= f * std::conj(Dx);
      }
    bwd(bx);
    bwd(by);
    const double norm = 1.0 / n;
    for (int m = 0; m < n; ++m) {
      a.vx[static_cast<size_t>(m) * a.comps + c] = bx[m].real() * norm;
      a.vy[static_cast<size_t>(m) * a.comps + c] = by[m].real() * norm;
    }
  }
}

void Spectral::implicit_site_curlcurl(RealSite& f, double coef) const {
  const int n = g.sites();
  std::vector<cdouble> b(static_cast<size_t>(n));
  for (int c = 0; c < f.comps; ++c) {
    for (int m = 0; m < n; ++m) b[m] = f.v[static_cast<size_t>(m) * f.comps + c];
    fwd(b);
    for (int q = 0; q < g.ny; ++q)
      for (int p = 0; p < g.nx; ++p) {
        const double ap = 2.0 * M_PI * p / g.nx, aq = 2.0 * M_PI * q / g.ny;
        const cdouble ex{std::cos(ap), std::sin(ap)}, ey{std::cos(aq), std::sin(aq)};
        const cdouble Dx = (ex - 1.0) / g.hx(), Dy = (ey - 1.0) / g.hy();
        const double m2 = std::norm(0.25 * (1.0 + ex) * (1.0 + ey));
        const double lam = std::norm(Dx) + std::norm(Dy);
        b[q * g.nx + p] /= 1.0 + coef * m2 * lam;
      }
    bwd(b);
    const double norm = 1.0 / n;
    for (int m = 0; m < n; ++m)
      f.v[static_cast<size_t>(m) * f.comps + c] = b[m].real() * norm;
  }
}

RealSite solve_poisson(const RealSite& rho) {
  Spectral sp(rho.g);
  return sp.poisson(rho);
}

}  // namespace vortexflow
