#include "vortexflow/functionals.hpp"

#include <cmath>

namespace vortexflow {

namespace {

// sum over sites of Im(Du_x . conj(Du_y)), times the cell measure; pairwise
// reduction over sites for determinism.
double pairing_im_sum(const LinkField<cdouble>& du) {
  const auto& g = du.g;
  std::vector<double> buf(static_cast<size_t>(g.sites()));
  for (int m = 0; m < g.sites(); ++m) {
    double s = 0.0;
    for (int c = 0; c < du.comps; ++c) {
      const cdouble& dx = du.vx[static_cast<size_t>(m) * du.comps + c];
      const cdouble& dy = du.vy[static_cast<size_t>(m) * du.comps + c];
      s += std::imag(dx * std::conj(dy));
    }
    buf[static_cast<size_t>(m)] = s;
  }
  return g.area() * pairwise_sum(buf);
}

}  // namespace

double ymh(const Pair& x) {
  RealPlaq F = curvature(x.A);
  LinkField<cdouble> du = covariant_d(x);
  RealSite mu = moment(x.u);
  return 0.5 * (inner(F, F) + inner(du, du) + inner(mu, mu));
}

double f_moment(const Pair& x) {
  RealSite phi = moment_residual(x).phi;
  return 0.5 * inner(phi, phi);
}

double dbar_energy(const Pair& x) {
  CSite r = dbar_residual(x);
  return 2.0 * inner(r, r);
}

double pairing(const Pair& x) {
  LinkField<cdouble> du = covariant_d(x);
  RealSite mu = moment(x.u);
  RealSite fs = avg_ps(curvature(x.A));
  return pairing_im_sum(du) - inner(mu, fs);
}

EnergyBreakdown energy_breakdown(const Pair& x) {
  RealPlaq F = curvature(x.A);
  RealSite fs = avg_ps(F);
  RealSite mu = moment(x.u);
  RealSite phi = fs;
  axpy(phi, 1.0, mu);
  LinkField<cdouble> du = covariant_d(x);
  CSite r = dbar_residual(x);

  EnergyBreakdown e;
  e.ymh = 0.5 * (inner(F, F) + inner(du, du) + inner(mu, mu));
  e.f_moment = 0.5 * inner(phi, phi);
  e.dbar_energy = 2.0 * inner(r, r);
  e.pairing = pairing_im_sum(du) - inner(mu, fs);
  e.identity_defect = e.ymh - e.f_moment - e.dbar_energy - e.pairing;
  return e;
}

TangentPair grad_f(const Pair& x) {
  RealSite phi = moment_residual(x).phi;
  return complexified_action_i(x, phi);
}

TangentPair grad_ymh(const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  LinkField<cdouble> T = link_transporters(x);
  LinkField<cdouble> du = covariant_d(x, T);
  RealSite mu = moment(x.u);

  TangentPair out(g, spec);
  out.a = codiff2(curvature(x.A));

  // matter current on links: W_bc Im(conj(T u(next)) Du)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      for (int c = 0; c < spec.n; ++c) {
        const double jx =
            std::imag(std::conj(T.x(i, j, c) * x.u.u.at(g.xp(i), j, c)) * du.x(i, j, c));
        const double jy =
            std::imag(std::conj(T.y(i, j, c) * x.u.u.at(i, g.yp(j), c)) * du.y(i, j, c));
        for (int b = 0; b < spec.k; ++b) {
          out.a.x(i, j, b) += spec.w(b, c) * jx;
          out.a.y(i, j, b) += spec.w(b, c) * jy;
        }
      }

  // matter part: D*(Du) + <W_j, mu> u_j
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double* mp = &mu.v[static_cast<size_t>(g.idx(i, j)) * spec.k];
      for (int c = 0; c < spec.n; ++c) {
        const cdouble dstar_x =
            (std::conj(T.x(g.xm(i), j, c)) * du.x(g.xm(i), j, c) - du.x(i, j, c)) * ihx;
        const cdouble dstar_y =
            (std::conj(T.y(i, g.ym(j), c)) * du.y(i, g.ym(j), c) - du.y(i, j, c)) * ihy;
        out.u.at(i, j, c) = dstar_x + dstar_y + spec.wdot(c, mp) * x.u.u.at(i, j, c);
      }
    }
  return out;
}

double sup_u2(const Pair& x) {
  const auto& spec = x.action();
  double best = 0.0;
  for (int m = 0; m < x.grid().sites(); ++m) {
    double s = 0.0;
    for (int j = 0; j < spec.n; ++j) s += std::norm(x.u.u.v[static_cast<size_t>(m) * spec.n + j]);
    best = std::max(best, s);
  }
  return best;
}

RealSite energy_density(const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  RealSite fs = curvature_site(x.A);
  RealSite mu = moment(x.u);
  CenteredD cd = covariant_d_centered(x);
  RealSite out(g, 1);
  for (int m = 0; m < g.sites(); ++m) {
    double s = 0.0;
    for (int a = 0; a < spec.k; ++a) {
      const double f = fs.v[static_cast<size_t>(m) * spec.k + a];
      const double u = mu.v[static_cast<size_t>(m) * spec.k + a];
      s += f * f + u * u;
    }
    for (int j = 0; j < spec.n; ++j)
      s += std::norm(cd.dx.v[static_cast<size_t>(m) * spec.n + j]) +
           std::norm(cd.dy.v[static_cast<size_t>(m) * spec.n + j]);
    out.v[static_cast<size_t>(m)] = 0.5 * s;
  }
  return out;
}

double omega_pairing(const TangentPair& b, const TangentPair& a) {
  double out = inner(rot90(b.a), a.a);
  const auto& g = b.u.g;
  std::vector<double> buf(static_cast<size_t>(g.sites()));
  for (int m = 0; m < g.sites(); ++m) {
    double s = 0.0;
    for (int c = 0; c < b.u.comps; ++c)
      s += std::imag(b.u.v[static_cast<size_t>(m) * b.u.comps + c] *
                     std::conj(a.u.v[static_cast<size_t>(m) * a.u.comps + c]));
    buf[static_cast<size_t>(m)] = s;
  }
  return out + g.area() * pairwise_sum(buf);
}

}  // namespace vortexflow
