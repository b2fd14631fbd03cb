#include "vortexflow/stability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace vortexflow {

namespace {

double mu_sup(const Section& u) {
  RealSite m = moment(u);
  double sup = 0.0;
  for (double v : m.v) sup = std::max(sup, std::abs(v));
  return sup;
}

std::vector<double> ray_times(double t_max) {
  std::vector<double> ts{0.0};
  for (double t = 0.25; t < t_max; t *= 1.5) ts.push_back(t);
  ts.push_back(t_max);
  return ts;
}

}  // namespace

WeightResult weight(const Pair& x, const RealSite& xi, double t_max,
                    double rel_tol, double div_cap) {
  WeightResult R;
  for (double t : ray_times(t_max)) {
    Pair xt = ray_point(x, xi, t);
    const double v = inner(moment_residual(xt).phi, xi);
    R.mu_sup_max = std::max(R.mu_sup_max, mu_sup(xt.u));
    if (!std::isfinite(v) || std::abs(v) > div_cap || R.mu_sup_max > div_cap) {
      R.kind = WeightKind::Infinite;
      R.mu_bounded = R.mu_sup_max <= div_cap && std::isfinite(R.mu_sup_max);
      return R;
    }
    R.samples.emplace_back(t, v);
    R.value = v;
  }
  const size_t n = R.samples.size();
  const double d_last = R.samples[n - 1].second - R.samples[n - 2].second;
  const double d_prev = R.samples[n - 2].second - R.samples[n - 3].second;
  R.slope = d_last / (R.samples[n - 1].first - R.samples[n - 2].first);
  R.err_estimate = std::max(d_last, 0.0);
  const double tol = rel_tol * std::max(1.0, std::abs(R.value));
  if (d_last <= tol)
    R.kind = WeightKind::Finite;
  else if (d_last >= d_prev * (1.0 - 1e-3))
    R.kind = WeightKind::Infinite;  // increments not shrinking over growing spans
  else
    R.kind = WeightKind::Inconclusive;
  return R;
}

MomentGrowth moment_growth_probe(const Pair& x, const RealSite& xi, double t_max,
                                 double div_cap) {
  MomentGrowth R;
  R.sup_begin = mu_sup(x.u);
  for (double t : ray_times(t_max)) {
    R.sup_end = mu_sup(ray_point(x, xi, t).u);
    R.sup_max = std::max(R.sup_max, R.sup_end);
    if (!std::isfinite(R.sup_end) || R.sup_end > div_cap) {
      R.bounded = false;
      R.grew = true;
      return R;
    }
  }
  R.grew = R.sup_max > 10.0 * R.sup_begin + 1.0;
  return R;
}

std::vector<double> kn_along_ray(const Pair& x, const RealSite& xi, double dt,
                                 int steps) {
  std::vector<double> kn(static_cast<size_t>(steps) + 1, 0.0);
  double v_prev = inner(moment_residual(x).phi, xi);
  for (int m = 1; m <= steps; ++m) {
    const double v = inner(moment_residual(ray_point(x, xi, m * dt)).phi, xi);
    kn[m] = kn[m - 1] + 0.5 * dt * (v_prev + v);
    v_prev = v;
  }
  return kn;
}

std::vector<double> kempf_ness_series(const Pair& x0,
                                      const std::vector<ComplexGauge>& path) {
  std::vector<double> out;
  out.push_back(0.0);
  if (path.size() < 2) return out;
  out.reserve(path.size());

  RealSite phi_prev = moment_residual(apply_complex_gauge(path[0], x0)).phi;
  for (size_t m = 1; m < path.size(); ++m) {
    RealSite phi = moment_residual(apply_complex_gauge(path[m], x0)).phi;
    RealSite ds = path[m].s;
    axpy(ds, -1.0, path[m - 1].s);
    out.push_back(out.back() + 0.5 * (inner(phi_prev, ds) + inner(phi, ds)));
    phi_prev = std::move(phi);
  }
  return out;
}

std::vector<double> kempf_ness_series(const Pair& x0,
                                      const std::vector<RealSite>& s_path) {
  std::vector<ComplexGauge> path;
  path.reserve(s_path.size());
  for (const auto& s : s_path) {
    ComplexGauge g(x0.grid(), x0.action().k);
    g.s = s;
    path.push_back(std::move(g));
  }
  return kempf_ness_series(x0, path);
}

double kempf_ness(const Pair& x0, const std::vector<RealSite>& s_path) {
  return kempf_ness_series(x0, s_path).back();
}

MomentWeightReport moment_weight_check(const Pair& x, const RealSite& xi,
                                       double terminal_phi, double tol) {
  MomentWeightReport rep;
  rep.w = weight(x, xi);
  rep.rhs = terminal_phi;
  if (rep.w.kind == WeightKind::Infinite) {
    rep.lhs_finite = false;
    rep.lhs = -1e300;
    rep.slack = 1e300;
    rep.eq_gap = 1e300;
    return rep;
  }
  // For Inconclusive weights the last sample still bounds w from below, so
  // -value/|xi| bounds the left side from above and the check stays valid.
  rep.lhs = -rep.w.value / l2norm(xi);
  rep.slack = rep.rhs - rep.lhs;
  rep.eq_gap = std::abs(rep.rhs - rep.lhs);
  if (rep.lhs > rep.rhs + tol)
    throw ViolationDetected("moment_weight_check: -w/|xi| = " +
                            std::to_string(rep.lhs) + " exceeds terminal |Phi| = " +
                            std::to_string(rep.rhs));
  return rep;
}

RealSite lsl_apply(const Pair& x, const RealSite& xi) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  RealSite out = laplacian(xi);
  for (int m = 0; m < g.sites(); ++m) {
    const double* xim = &xi.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j) {
      const double c =
          std::norm(x.u.u.v[static_cast<size_t>(m) * spec.n + j]) * spec.wdot(j, xim);
      for (int a = 0; a < spec.k; ++a)
        out.v[static_cast<size_t>(m) * spec.k + a] += spec.w(a, j) * c;
    }
  }
  return out;
}

namespace {

// Solve (L*L + shift) w = rhs by conjugate gradients preconditioned with
// (laplacian + gamma)^{-1}, gamma = shift + mean pointwise coefficient.
RealSite lsl_solve(const Pair& x, const Spectral& sp, const RealSite& rhs,
                   double shift, double gamma) {
  auto apply_op = [&](const RealSite& z) {
    RealSite az = lsl_apply(x, z);
    axpy(az, shift, z);
    return az;
  };
  auto precond = [&](const RealSite& r) {
    RealSite z = r;
    scale(z, 1.0 / gamma);
    sp.implicit_helmholtz(z, 1.0 / gamma);
    return z;
  };

  RealSite w(rhs.g, rhs.comps);
  RealSite r = rhs;
  RealSite z = precond(r);
  RealSite p = z;
  double rz = inner(r, z);
  const double target = 1e-24 * inner(rhs, rhs);
  for (int it = 0; it < 500 && inner(r, r) > target; ++it) {
    RealSite ap = apply_op(p);
    const double alpha = rz / inner(p, ap);
    axpy(w, alpha, p);
    axpy(r, -alpha, ap);
    z = precond(r);
    const double rz_new = inner(r, z);
    scale(p, rz_new / rz);
    axpy(p, 1.0, z);
    rz = rz_new;
  }
  return w;
}

}  // namespace

double sigma_min_lsl(const Pair& x, int outer_iters, double shift) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  Spectral sp(g);

  double qbar = 0.0;
  for (int m = 0; m < g.sites(); ++m)
    for (int j = 0; j < spec.n; ++j) {
      double w2 = 0.0;
      for (int a = 0; a < spec.k; ++a) w2 += spec.w(a, j) * spec.w(a, j);
      qbar += std::norm(x.u.u.v[static_cast<size_t>(m) * spec.n + j]) * w2;
    }
  qbar /= static_cast<double>(g.sites()) * spec.k;
  const double gamma = shift + std::max(qbar, 1e-12);

  // start with a constant plus a smooth varying part so both a potential
  // kernel mode and generic modes are represented
  RealSite z = random_site(g, spec.k, 5, 0.3);
  for (auto& v : z.v) v += 1.0;
  scale(z, 1.0 / l2norm(z));

  double rq = inner(z, lsl_apply(x, z));
  for (int it = 0; it < outer_iters; ++it) {
    RealSite w = lsl_solve(x, sp, z, shift, gamma);
    const double nw = l2norm(w);
    if (!(nw > 0.0)) break;
    scale(w, 1.0 / nw);
    z = std::move(w);
    const double rq_new = inner(z, lsl_apply(x, z));
    if (std::abs(rq_new - rq) <= 1e-12 * std::max(1.0, std::abs(rq_new))) {
      rq = rq_new;
      break;
    }
    rq = rq_new;
  }
  return rq;
}

double stabilizer_gap(const Pair& x) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  std::vector<double> mass(spec.n, 0.0);
  for (int m = 0; m < g.sites(); ++m)
    for (int j = 0; j < spec.n; ++j)
      mass[j] += std::norm(x.u.u.v[static_cast<size_t>(m) * spec.n + j]);
  for (double& mj : mass) mj *= g.area();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(spec.k, spec.k);
  for (int j = 0; j < spec.n; ++j)
    for (int a = 0; a < spec.k; ++a)
      for (int b = 0; b < spec.k; ++b) G(a, b) += mass[j] * spec.w(a, j) * spec.w(b, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  return es.eigenvalues().minCoeff() / g.vol();
}

Classification classify_limit(const FlowResult& r, const ClassifyTols& tols) {
  const Pair& x = r.state.x;
  const auto& g = x.grid();
  const auto& spec = x.action();
  RealSite phi = moment_residual(x).phi;

  Classification c;
  c.phi_norm = l2norm(phi);

  CSite wu(g, spec.n);
  for (int m = 0; m < g.sites(); ++m) {
    const double* pm = &phi.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j)
      wu.v[static_cast<size_t>(m) * spec.n + j] =
          spec.wdot(j, pm) * x.u.u.v[static_cast<size_t>(m) * spec.n + j];
  }
  c.crit_residual = std::max(l2norm(d0(phi)), l2norm(wu));
  if (c.crit_residual > 10.0 * tols.crit_tol)
    throw NotCritical("classify_limit: stationarity residual " +
                      std::to_string(c.crit_residual));

  if (!r.marks.empty()) {
    const double T = r.state.t;
    const std::pair<double, RealSite>* half = nullptr;
    for (const auto& mk : r.marks)
      if (mk.first < T && (!half || std::abs(mk.first - 0.5 * T) <
                                        std::abs(half->first - 0.5 * T)))
        half = &mk;
    if (half) {
      RealSite d = r.state.s;
      axpy(d, -1.0, half->second);
      c.gauge_drift = l2norm(d);
    }
  }

  if (c.phi_norm <= tols.phi_tol) {
    if (c.gauge_drift > tols.drift_tol) {
      c.verdict = "semistable-only";
      return c;
    }
    c.sigma_min = sigma_min_lsl(x);
    c.verdict = c.sigma_min > tols.stab_tol ? "stable" : "polystable";
    return c;
  }

  // Nonzero level: a level that has settled means an unstable limit; a level
  // still sinking (roughly halved over the trailing half of the run) with an
  // escaping gauge is the boundary case whose orbit never reaches zero.
  double phi_half = c.phi_norm;
  const double t_half = r.t_begin + 0.5 * (r.state.t - r.t_begin);
  double best = 1e300;
  for (const auto& p : r.series)
    if (std::abs(p.t - t_half) < best) {
      best = std::abs(p.t - t_half);
      phi_half = p.phi_l2;
    }
  const double rho = phi_half > 0.0 ? c.phi_norm / phi_half : 1.0;
  c.verdict = rho >= 0.9 ? "unstable" : "semistable-only";
  return c;
}

namespace {

std::vector<double> u2_field(const Section& u) {
  std::vector<double> out(u.u.v.size());
  for (size_t m = 0; m < out.size(); ++m) out[m] = std::norm(u.u.v[m]);
  return out;
}

// sup |a - b| with b translated by (di, dj) lattice sites.
double sup_dev_shifted(const TorusGrid& g, int comps, const std::vector<double>& a,
                       const std::vector<double>& b, int di, int dj) {
  double sup = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const int js = (j + dj) % g.ny;
    for (int i = 0; i < g.nx; ++i) {
      const int is = (i + di) % g.nx;
      const size_t ma = static_cast<size_t>(g.idx(i, j)) * comps;
      const size_t mb = static_cast<size_t>(g.idx(is, js)) * comps;
      for (int c = 0; c < comps; ++c)
        sup = std::max(sup, std::abs(a[ma + c] - b[mb + c]));
    }
  }
  return sup;
}

}  // namespace

UniquenessReport ness_uniqueness(const Pair& initial, const ComplexGauge& g,
                                 const FlowConfig& cfg) {
  Pair moved = apply_complex_gauge(g, initial);

  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VORTEXFLOW_THREADS")) threads = std::atoi(env);
  if (threads < 1) threads = 1;

  FlowResult r1, r2;
  if (threads >= 2) {
    auto fut = std::async(std::launch::async,
                          [&initial, &cfg] { return run_flow(initial, cfg); });
    r2 = run_flow(moved, cfg);
    r1 = fut.get();
  } else {
    r1 = run_flow(initial, cfg);
    r2 = run_flow(moved, cfg);
  }

  UniquenessReport rep;
  rep.status1 = r1.status;
  rep.status2 = r2.status;

  const Pair& x1 = r1.state.x;
  const Pair& x2 = r2.state.x;
  const TorusGrid& grid = x1.grid();
  const int n = x1.action().n;
  const int k = x1.action().k;

  // translation alignment on the |u|^2 observable
  std::vector<double> u21 = u2_field(x1.u), u22 = u2_field(x2.u);
  double best = 1e300;
  for (int dj = 0; dj < grid.ny; ++dj)
    for (int di = 0; di < grid.nx; ++di) {
      const double d = sup_dev_shifted(grid, n, u21, u22, di, dj);
      if (d < best) {
        best = d;
        rep.shift_i = di;
        rep.shift_j = dj;
      }
    }
  rep.u2_dev = best;

  RealSite p1 = moment_residual(x1).phi, p2 = moment_residual(x2).phi;
  rep.curv_dev = sup_dev_shifted(grid, k, curvature_site(x1.A).v,
                                 curvature_site(x2.A).v, rep.shift_i, rep.shift_j);
  rep.phi_dev = sup_dev_shifted(grid, k, p1.v, p2.v, rep.shift_i, rep.shift_j);
  rep.density_dev = sup_dev_shifted(grid, 1, energy_density(x1).v,
                                    energy_density(x2).v, rep.shift_i, rep.shift_j);
  rep.max_obs_dev = std::max({rep.u2_dev, rep.curv_dev, rep.phi_dev, rep.density_dev});
  rep.phi_norm_dev = std::abs(l2norm(p1) - l2norm(p2));
  return rep;
}

}  // namespace vortexflow
