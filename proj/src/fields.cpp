#include "vortexflow/fields.hpp"

#include <cmath>

namespace vortexflow {

ActionSpec::ActionSpec(int k_, int n_, std::vector<int> W_, std::vector<double> tau_,
                       std::vector<int> degrees_)
    : k(k_), n(n_), W(std::move(W_)), tau(std::move(tau_)), degrees(std::move(degrees_)) {
  if (k < 1 || n < 1) throw ConfigError("ActionSpec: need k, n >= 1");
  if (W.size() != static_cast<size_t>(k) * n)
    throw ConfigError("ActionSpec: weight matrix must be k x n");
  if (tau.size() != static_cast<size_t>(k)) throw ConfigError("ActionSpec: tau must have k entries");
  if (degrees.size() != static_cast<size_t>(k))
    throw ConfigError("ActionSpec: degrees must have k entries");
}

bool ActionSpec::moment_proper(double radius, int samples) const {
  CounterRng rng{0x9e3779b97f4a7c15ull};
  for (int s = 0; s < samples; ++s) {
    // random direction on the unit sphere of C^n
    std::vector<double> v(2 * n);
    double nrm = 0.0;
    for (int m = 0; m < 2 * n; ++m) {
      v[m] = rng.gaussian(7, static_cast<uint64_t>(s) * 2 * n + m);
      nrm += v[m] * v[m];
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) continue;
    double worst = 0.0;
    for (int a = 0; a < k; ++a) {
      double q = 0.0;
      for (int j = 0; j < n; ++j) {
        const double re = v[2 * j] / nrm, im = v[2 * j + 1] / nrm;
        q += 0.5 * w(a, j) * (re * re + im * im);
      }
      worst = std::max(worst, std::abs(q));
    }
    if (worst * radius * radius < 1.0) return false;  // direction where mu stays bounded
  }
  return true;
}

std::vector<double> background_flux_density(const ActionSpec& spec, const TorusGrid& g) {
  std::vector<double> beta(spec.k);
  for (int a = 0; a < spec.k; ++a) beta[a] = 2.0 * M_PI * spec.degrees[a] / g.vol();
  return beta;
}

Section::Section(const TorusGrid& g_, const ActionSpec& spec_)
    : g(g_), spec(spec_), u(g_, spec_.n) {
  // Seam cocycle consistency: transporting around the seam corner must be
  // single-valued, i.e. <W_j, degrees> integral for every component.
  const auto beta = background_flux_density(spec, g);
  for (int j = 0; j < spec.n; ++j) {
    const double phase = spec.wdot(j, beta.data()) * g.lx * g.ly;  // = 2 pi <W_j, deg>
    if (std::abs(std::remainder(phase, 2.0 * M_PI)) > 1e-9)
      throw ConfigError("Section: seam cocycle inconsistent with degrees and weights");
  }
}

Pair::Pair(Connection A_, Section u_) : A(std::move(A_)), u(std::move(u_)) {
  if (!(A.g == u.g) || !(A.spec == u.spec))
    throw ConfigError("Pair: connection and section disagree on grid or action data");
}

double inner(const TangentPair& x, const TangentPair& y) {
  return inner(x.a, y.a) + inner(x.u, y.u);
}
double l2norm(const TangentPair& x) { return std::sqrt(inner(x, x)); }
TangentPair& axpy(TangentPair& y, double alpha, const TangentPair& x) {
  axpy(y.a, alpha, x.a);
  axpy(y.u, alpha, x.u);
  return y;
}
TangentPair& scale(TangentPair& y, double alpha) {
  scale(y.a, alpha);
  scale(y.u, alpha);
  return y;
}

ComplexGauge compose(const ComplexGauge& g2, const ComplexGauge& g1) {
  ComplexGauge out = g1;
  axpy(out.s, 1.0, g2.s);
  axpy(out.theta, 1.0, g2.theta);
  return out;
}

ComplexGauge inverse(const ComplexGauge& gc) {
  ComplexGauge out = gc;
  scale(out.s, -1.0);
  scale(out.theta, -1.0);
  return out;
}

RealPlaq curvature(const Connection& A) {
  RealPlaq f = d1(A.a);
  const auto beta = background_flux_density(A.spec, A.g);
  for (int m = 0; m < A.g.sites(); ++m)
    for (int a = 0; a < A.spec.k; ++a) f.v[static_cast<size_t>(m) * A.spec.k + a] += beta[a];
  return f;
}

RealSite curvature_site(const Connection& A) {
  RealSite f = avg_ps(d1(A.a));
  const auto beta = background_flux_density(A.spec, A.g);
  for (int m = 0; m < A.g.sites(); ++m)
    for (int a = 0; a < A.spec.k; ++a) f.v[static_cast<size_t>(m) * A.spec.k + a] += beta[a];
  return f;
}

RealSite moment(const Section& sec) {
  const auto& spec = sec.spec;
  RealSite mu(sec.g, spec.k);
  for (int m = 0; m < sec.g.sites(); ++m) {
    const cdouble* up = &sec.u.v[static_cast<size_t>(m) * spec.n];
    double* mp = &mu.v[static_cast<size_t>(m) * spec.k];
    for (int a = 0; a < spec.k; ++a) {
      double s = 0.0;
      for (int j = 0; j < spec.n; ++j) s += spec.w(a, j) * std::norm(up[j]);
      mp[a] = 0.5 * s - spec.tau[a];
    }
  }
  return mu;
}

MomentResidual moment_residual(const Pair& x) {
  MomentResidual out{curvature_site(x.A)};
  RealSite mu = moment(x.u);
  axpy(out.phi, 1.0, mu);
  return out;
}

namespace {

// Link transporters for component j.  tx maps the fiber at (i+1,j) to the
// fiber at (i,j); ty maps (i,j+1) to (i,j).  The x transporter at the seam
// column includes the transition phase exp(-i<W_j,beta> lx y).
struct Transport {
  const Pair& x;
  std::vector<double> beta;
  Transport(const Pair& x_) : x(x_), beta(background_flux_density(x_.action(), x_.grid())) {}

  cdouble tx(int i, int j, int comp) const {
    const auto& g = x.grid();
    const auto& spec = x.action();
    double ph = g.hx() * spec.wdot(comp, &x.A.a.vx[static_cast<size_t>(g.idx(i, j)) * spec.k]);
    if (i == g.nx - 1) ph -= spec.wdot(comp, beta.data()) * g.lx * (j * g.hy());
    return {std::cos(ph), std::sin(ph)};
  }
  cdouble ty(int i, int j, int comp) const {
    const auto& g = x.grid();
    const auto& spec = x.action();
    double ph = g.hy() * (spec.wdot(comp, &x.A.a.vy[static_cast<size_t>(g.idx(i, j)) * spec.k]) +
                          spec.wdot(comp, beta.data()) * (i * g.hx()));
    return {std::cos(ph), std::sin(ph)};
  }
};

}  // namespace

LinkField<cdouble> link_transporters(const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  LinkField<cdouble> out(g, spec.n);
  Transport tr(x);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < spec.n; ++c) {
        out.x(i, j, c) = tr.tx(i, j, c);
        out.y(i, j, c) = tr.ty(i, j, c);
      }
  return out;
}

LinkField<cdouble> covariant_d(const Pair& x, const LinkField<cdouble>& T) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  LinkField<cdouble> out(g, spec.n);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < spec.n; ++c) {
        out.x(i, j, c) = (T.x(i, j, c) * x.u.u.at(g.xp(i), j, c) - x.u.u.at(i, j, c)) * ihx;
        out.y(i, j, c) = (T.y(i, j, c) * x.u.u.at(i, g.yp(j), c) - x.u.u.at(i, j, c)) * ihy;
      }
  return out;
}

LinkField<cdouble> covariant_d(const Pair& x) { return covariant_d(x, link_transporters(x)); }

CenteredD covariant_d_centered(const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  CenteredD out{CSite(g, spec.n), CSite(g, spec.n)};
  Transport tr(x);
  const double i2hx = 0.5 / g.hx(), i2hy = 0.5 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < spec.n; ++c) {
        out.dx.at(i, j, c) = (tr.tx(i, j, c) * x.u.u.at(g.xp(i), j, c) -
                              std::conj(tr.tx(g.xm(i), j, c)) * x.u.u.at(g.xm(i), j, c)) * i2hx;
        out.dy.at(i, j, c) = (tr.ty(i, j, c) * x.u.u.at(i, g.yp(j), c) -
                              std::conj(tr.ty(i, g.ym(j), c)) * x.u.u.at(i, g.ym(j), c)) * i2hy;
      }
  return out;
}

CSite dbar_residual(const Pair& x) {
  CenteredD cd = covariant_d_centered(x);
  CSite out(x.grid(), x.action().n);
  const cdouble I{0.0, 1.0};
  for (size_t m = 0; m < out.v.size(); ++m) out.v[m] = 0.5 * (cd.dx.v[m] - I * cd.dy.v[m]);
  return out;
}

TangentPair infinitesimal_action(const Pair& x, const RealSite& xi) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  TangentPair t(g, spec);
  t.a = d0(xi);
  scale(t.a, -1.0);
  const cdouble I{0.0, 1.0};
  for (int m = 0; m < g.sites(); ++m) {
    const double* xp = &xi.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j)
      t.u.v[static_cast<size_t>(m) * spec.n + j] =
          I * spec.wdot(j, xp) * x.u.u.v[static_cast<size_t>(m) * spec.n + j];
  }
  return t;
}

RealSite infinitesimal_action_adjoint(const Pair& x, const TangentPair& t) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  RealSite out = codiff(t.a);
  scale(out, -1.0);
  for (int m = 0; m < g.sites(); ++m) {
    const cdouble* up = &x.u.u.v[static_cast<size_t>(m) * spec.n];
    const cdouble* tp = &t.u.v[static_cast<size_t>(m) * spec.n];
    double* op = &out.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j) {
      const double im = std::imag(std::conj(up[j]) * tp[j]);
      for (int a = 0; a < spec.k; ++a) op[a] += spec.w(a, j) * im;
    }
  }
  return out;
}

TangentPair complexified_action_i(const Pair& x, const RealSite& xi) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  TangentPair t(g, spec);
  t.a = codiff2(avg_sp(xi));
  for (int m = 0; m < g.sites(); ++m) {
    const double* xp = &xi.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j)
      t.u.v[static_cast<size_t>(m) * spec.n + j] =
          spec.wdot(j, xp) * x.u.u.v[static_cast<size_t>(m) * spec.n + j];
  }
  return t;
}

Pair apply_complex_gauge(const ComplexGauge& gc, const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  Pair out = x;
  RealLink da = d0(gc.theta);
  axpy(out.A.a, -1.0, da);
  RealLink ds = codiff2(avg_sp(gc.s));
  axpy(out.A.a, 1.0, ds);
  for (int m = 0; m < g.sites(); ++m) {
    const double* sp = &gc.s.v[static_cast<size_t>(m) * spec.k];
    const double* tp = &gc.theta.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j) {
      const double r = spec.wdot(j, sp), th = spec.wdot(j, tp);
      out.u.u.v[static_cast<size_t>(m) * spec.n + j] *=
          std::exp(r) * cdouble{std::cos(th), std::sin(th)};
    }
  }
  return out;
}

Pair ray_point(const Pair& x, const RealSite& xi, double t) {
  ComplexGauge gc(x.grid(), x.action().k);
  gc.s = xi;
  scale(gc.s, t);
  return apply_complex_gauge(gc, x);
}

Pair vortex_ansatz(const TorusGrid& g, const ActionSpec& spec, double amplitude) {
  Pair out(g, spec);
  const auto beta = background_flux_density(spec, g);
  for (int j = 0; j < spec.n; ++j) {
    double deff = 0.0;
    for (int a = 0; a < spec.k; ++a) deff += spec.w(a, j) * spec.degrees[a];
    if (deff < -0.5) continue;  // no holomorphic sections; leave zero
    if (std::abs(deff) < 0.5) {
      for (int m = 0; m < g.sites(); ++m)
        out.u.u.v[static_cast<size_t>(m) * spec.n + j] = amplitude;
      continue;
    }
    const double bj = spec.wdot(j, beta.data());  // > 0 here
    const int mmax = static_cast<int>(std::ceil(std::sqrt(120.0 / bj) / g.lx)) + 2;
    for (int jj = 0; jj < g.ny; ++jj)
      for (int i = 0; i < g.nx; ++i) {
        const double xx = i * g.hx(), yy = jj * g.hy();
        cdouble s{0.0, 0.0};
        for (int m = -mmax; m <= mmax; ++m) {
          const double e = -0.5 * bj * (xx + m * g.lx) * (xx + m * g.lx);
          if (e < -120.0) continue;
          const double ph = bj * m * g.lx * yy;
          s += std::exp(e) * cdouble{std::cos(ph), std::sin(ph)};
        }
        out.u.u.at(i, jj, j) = amplitude * s;
      }
  }
  return out;
}

namespace {
// Low-mode random synthesis shared by the initializers.  Every coefficient is
// a pure function of (seed, stream, mode), so the result does not depend on
// traversal order.
void add_random_modes(double* dst, int stride, int comp_count, const TorusGrid& g,
                      const CounterRng& rng, uint64_t stream, double amplitude, int mmax) {
  for (int c = 0; c < comp_count; ++c)
    for (int p = -mmax; p <= mmax; ++p)
      for (int q = -mmax; q <= mmax; ++q) {
        const uint64_t ctr =
            (static_cast<uint64_t>(c) << 32) |
            (static_cast<uint64_t>(p + mmax) << 16) | static_cast<uint64_t>(q + mmax);
        const double w = amplitude * std::exp(-0.35 * (p * p + q * q));
        const double g1 = rng.gaussian(stream, 2 * ctr) * w;
        const double g2 = rng.gaussian(stream, 2 * ctr + 1) * w;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            const double ph = 2.0 * M_PI * (static_cast<double>(p) * i / g.nx +
                                            static_cast<double>(q) * j / g.ny);
            dst[(static_cast<size_t>(g.idx(i, j)) * comp_count + c) * stride] +=
                g1 * std::cos(ph) + g2 * std::sin(ph);
          }
      }
}
}  // namespace

RealSite random_site(const TorusGrid& g, int comps, uint64_t seed, double amplitude,
                     int mmax, uint64_t stream0) {
  CounterRng rng{seed};
  RealSite out(g, comps);
  add_random_modes(out.v.data(), 1, comps, g, rng, stream0, amplitude, mmax);
  return out;
}

Pair random_pair(const TorusGrid& g, const ActionSpec& spec, uint64_t seed,
                 double amplitude, int mmax) {
  CounterRng rng{seed};
  Pair out(g, spec);
  add_random_modes(out.A.a.vx.data(), 1, spec.k, g, rng, 101, amplitude, mmax);
  add_random_modes(out.A.a.vy.data(), 1, spec.k, g, rng, 102, amplitude, mmax);
  // complex section: independent real and imaginary parts
  add_random_modes(reinterpret_cast<double*>(out.u.u.v.data()), 2, spec.n, g, rng, 103,
                   amplitude, mmax);
  add_random_modes(reinterpret_cast<double*>(out.u.u.v.data()) + 1, 2, spec.n, g, rng, 104,
                   amplitude, mmax);
  return out;
}

ComplexGauge random_gauge(const TorusGrid& g, int k, uint64_t seed, double amplitude,
                          int mmax) {
  CounterRng rng{seed};
  ComplexGauge out(g, k);
  add_random_modes(out.s.v.data(), 1, k, g, rng, 201, amplitude, mmax);
  add_random_modes(out.theta.v.data(), 1, k, g, rng, 202, amplitude, mmax);
  return out;
}

Pair constant_pair(const TorusGrid& g, const ActionSpec& spec, cdouble value) {
  Pair out(g, spec);
  for (int m = 0; m < g.sites(); ++m)
    for (int j = 0; j < spec.n; ++j) out.u.u.v[static_cast<size_t>(m) * spec.n + j] = value;
  return out;
}

}  // namespace vortexflow
