#include "vortexflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace vortexflow {

double compact_region_bound(const Pair& x0) {
  const auto& spec = x0.action();
  double wmin = 0.0;
  bool has_pos = false;
  for (int e : spec.W)
    if (e > 0) {
      wmin = has_pos ? std::min(wmin, static_cast<double>(e)) : static_cast<double>(e);
      has_pos = true;
    }
  double taumax = 0.0;
  for (double t : spec.tau) taumax = std::max(taumax, t);
  const double cap = has_pos ? 2.0 * taumax / wmin : 0.0;
  return std::max(sup_u2(x0), cap);
}

namespace {

struct Deriv {
  TangentPair dx;  // minus the gradient of the flowed functional
  RealSite phi;
  double phi2 = 0;       // ||Phi||^2
  double fval = 0;       // flowed functional value
  double grad_norm = 0;  // gradient norm of the flowed functional
};

Deriv eval_rhs(const Pair& x, FlowFunctional fn) {
  Deriv d;
  d.phi = moment_residual(x).phi;
  d.phi2 = inner(d.phi, d.phi);
  if (fn == FlowFunctional::Moment) {
    d.dx = complexified_action_i(x, d.phi);
    d.fval = 0.5 * d.phi2;
  } else {
    d.dx = grad_ymh(x);
    d.fval = ymh(x);
  }
  d.grad_norm = l2norm(d.dx);
  scale(d.dx, -1.0);
  return d;
}

Pair advance(const Pair& x, double dt, const TangentPair& v) {
  Pair c = x;
  axpy(c.A.a, dt, v.a);
  axpy(c.u.u, dt, v.u);
  return c;
}

// One candidate step; fills the new pair and the tracker increments
// (ds = s_new - s, dkn only for RK4 where the stage quadrature is natural;
// other schemes use the endpoint trapezoid once the new Phi is known).
struct Candidate {
  Pair x;
  RealSite ds;
  double dkn = 0;
  bool has_dkn = false;
};

Candidate euler_candidate(const Pair& x, const Deriv& k1, double dt) {
  Candidate c;
  c.x = advance(x, dt, k1.dx);
  c.ds = k1.phi;
  scale(c.ds, -dt);
  return c;
}

Candidate rk4_candidate(const Pair& x, const Deriv& k1, double dt, FlowFunctional fn) {
  Deriv k2 = eval_rhs(advance(x, 0.5 * dt, k1.dx), fn);
  Deriv k3 = eval_rhs(advance(x, 0.5 * dt, k2.dx), fn);
  Deriv k4 = eval_rhs(advance(x, dt, k3.dx), fn);

  TangentPair v = k1.dx;
  axpy(v, 2.0, k2.dx);
  axpy(v, 2.0, k3.dx);
  axpy(v, 1.0, k4.dx);

  Candidate c;
  c.x = advance(x, dt / 6.0, v);
  c.ds = k1.phi;
  axpy(c.ds, 2.0, k2.phi);
  axpy(c.ds, 2.0, k3.phi);
  axpy(c.ds, 1.0, k4.phi);
  scale(c.ds, -dt / 6.0);
  c.dkn = -(dt / 6.0) * (k1.phi2 + 2.0 * k2.phi2 + 2.0 * k3.phi2 + k4.phi2);
  c.has_dkn = true;
  return c;
}

// IMEX step for the moment flow.  The whole step is one complex-gauge move
// x -> exp(ds).x with ds = -dt (I + dt L)^{-1} Phi, L = avg_ps d1 codiff2
// avg_sp: the stiff curvature response to a gauge increment is inverted
// spectrally, and the *same* smoothed increment drives the section (pointwise
// exponential) and the connection (codiff2 avg_sp), so the trajectory never
// leaves the complex-gauge orbit of x(0).  Fixed points are exactly Phi = 0,
// and the connection dynamics agree with an implicit curl-curl solve of the
// raw update by the resolvent push-through identity.
Candidate semi_moment_candidate(const Pair& x, const Deriv& k1, double dt,
                                const Spectral& sp) {
  const auto& g = x.grid();
  const auto& spec = x.action();
  Candidate c;
  c.ds = k1.phi;
  sp.implicit_site_curlcurl(c.ds, dt);
  scale(c.ds, -dt);
  c.x = x;
  for (int m = 0; m < g.sites(); ++m) {
    const double* pp = &c.ds.v[static_cast<size_t>(m) * spec.k];
    for (int j = 0; j < spec.n; ++j)
      c.x.u.u.v[static_cast<size_t>(m) * spec.n + j] *= std::exp(spec.wdot(j, pp));
  }
  RealLink da = codiff2(avg_sp(c.ds));
  axpy(c.x.A.a, 1.0, da);
  return c;
}

// IMEX step for the ymh flow: raw-lattice Laplacian of u and the curl-curl
// part of the connection gradient treated implicitly, the remainder (gauge
// couplings, currents, potential term) explicitly.
Candidate semi_ymh_candidate(const Pair& x, const Deriv& k1, double dt,
                             const Spectral& sp) {
  Candidate c;
  c.x = x;

  TangentPair grad = k1.dx;  // = -grad_ymh
  scale(grad, -1.0);
  RealLink stiff_a = codiff2(d1(x.A.a));
  axpy(grad.a, -1.0, stiff_a);  // explicit remainder for a
  SiteField<cdouble> lap_u = laplacian(x.u.u);
  axpy(grad.u, -1.0, lap_u);  // explicit remainder for u

  axpy(c.x.A.a, -dt, grad.a);
  sp.implicit_curlcurl(c.x.A.a, dt, false);
  axpy(c.x.u.u, -dt, grad.u);
  sp.implicit_helmholtz(c.x.u.u, dt);

  c.ds = k1.phi;
  scale(c.ds, -dt);
  return c;
}

SeriesPoint make_point(const FlowState& st, double grad_norm) {
  EnergyBreakdown e = energy_breakdown(st.x);
  SeriesPoint p;
  p.t = st.t;
  p.ymh = e.ymh;
  p.f_moment = e.f_moment;
  p.dbar_resid = std::sqrt(std::max(0.0, 0.5 * e.dbar_energy));
  p.phi_l2 = std::sqrt(std::max(0.0, 2.0 * e.f_moment));
  p.sup_u2 = sup_u2(st.x);
  p.kn_value = st.kn;
  p.grad_norm = grad_norm;
  return p;
}

}  // namespace

FlowResult run_flow(FlowState init, const FlowConfig& cfg) {
  FlowResult R;
  FlowState st = std::move(init);
  R.t_begin = st.t;
  const TorusGrid grid = st.x.grid();
  if (st.s.v.empty()) st.s = RealSite(grid, st.x.action().k);

  double dt = st.dt > 0.0 ? st.dt : cfg.dt0;
  R.sup_u2_bound = compact_region_bound(st.x);
  const double blowup_threshold = cfg.blowup_factor * R.sup_u2_bound + 1e-9;

  std::unique_ptr<Spectral> sp;
  if (cfg.scheme == Scheme::SemiImplicit) sp = std::make_unique<Spectral>(grid);

  Deriv cur = eval_rhs(st.x, cfg.functional);
  double ymh_prev = (cfg.functional == FlowFunctional::Ymh) ? cur.fval : ymh(st.x);

  double next_mark = 0.5;
  while (next_mark <= st.t + 1e-12) next_mark *= 2.0;

  R.series.push_back(make_point(st, cur.grad_norm));
  int since_record = 0, since_snapshot = 0;
  bool recorded_last = true;

  for (;;) {
    if (cur.grad_norm <= cfg.grad_tol) {
      R.status = FlowStatus::Converged;
      break;
    }
    if (st.t >= cfg.t_max - 1e-12 || R.steps >= cfg.max_steps) {
      R.status = FlowStatus::MaxTimeReached;
      break;
    }

    double dt_try = std::min(dt, cfg.t_max - st.t);
    Candidate cand;
    Deriv nxt;
    bool stalled = false;
    for (;;) {
      switch (cfg.scheme) {
        case Scheme::ExplicitEuler: cand = euler_candidate(st.x, cur, dt_try); break;
        case Scheme::RK4: cand = rk4_candidate(st.x, cur, dt_try, cfg.functional); break;
        case Scheme::SemiImplicit:
          cand = (cfg.functional == FlowFunctional::Moment)
                     ? semi_moment_candidate(st.x, cur, dt_try, *sp)
                     : semi_ymh_candidate(st.x, cur, dt_try, *sp);
          break;
      }
      nxt = eval_rhs(cand.x, cfg.functional);
      if (nxt.fval <= cur.fval + cfg.monotone_slack) break;
      ++R.rejects;
      dt_try *= 0.5;
      if (dt_try < cfg.dt_min) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      R.status = FlowStatus::Stalled;
      break;
    }

    // commit
    const double dkn =
        cand.has_dkn ? cand.dkn : -dt_try * 0.5 * (cur.phi2 + nxt.phi2);
    st.x = std::move(cand.x);
    axpy(st.s, 1.0, cand.ds);
    st.kn += dkn;
    st.t += dt_try;
    ++R.steps;
    cur = std::move(nxt);

    const double ymh_now =
        (cfg.functional == FlowFunctional::Ymh) ? cur.fval : ymh(st.x);
    R.max_ymh_step_increase = std::max(R.max_ymh_step_increase, ymh_now - ymh_prev);
    ymh_prev = ymh_now;

    const double s2 = sup_u2(st.x);
    R.max_u2_excess = std::max(R.max_u2_excess, s2 - R.sup_u2_bound);

    while (st.t >= next_mark) {
      R.marks.emplace_back(st.t, st.s);
      next_mark *= 2.0;
    }

    dt = std::min(dt_try * cfg.dt_grow, cfg.dt_max);
    st.dt = dt;

    recorded_last = false;
    if (++since_record >= cfg.series_stride) {
      R.series.push_back(make_point(st, cur.grad_norm));
      since_record = 0;
      recorded_last = true;
    }
    if (cfg.snapshot_every > 0 && cfg.on_snapshot &&
        ++since_snapshot >= cfg.snapshot_every) {
      cfg.on_snapshot(st);
      since_snapshot = 0;
    }

    if (s2 > blowup_threshold) {
      R.status = FlowStatus::BlowUp;
      break;
    }
  }

  if (!recorded_last) R.series.push_back(make_point(st, cur.grad_norm));
  R.grad_norm = cur.grad_norm;
  R.state = std::move(st);
  return R;
}

FlowResult run_flow(const Pair& x0, const FlowConfig& cfg) {
  return run_flow(FlowState(x0), cfg);
}

ComplexGauge tracked_gauge(const FlowState& st) {
  ComplexGauge g(st.x.grid(), st.x.action().k);
  g.s = st.s;
  scale(g.s, -1.0);
  return g;
}

Cartan cartan_decompose(const ComplexGauge& g) {
  Cartan c;
  c.xi = g.s;
  scale(c.xi, -1.0);
  c.compact = g;
  for (auto& v : c.compact.s.v) v = 0.0;
  return c;
}

AsymptoticDirection dominant_weight_estimate(const FlowResult& r, double rel_tol,
                                             double abs_tol) {
  const double T = r.state.t;
  if (T <= 0.0 || r.marks.empty())
    throw NotConverged("dominant_weight_estimate: flow too short, no tracker marks");

  auto nearest = [&](double target, double lo, double hi) -> const std::pair<double, RealSite>* {
    const std::pair<double, RealSite>* best = nullptr;
    for (const auto& m : r.marks) {
      if (m.first < lo || m.first > hi) continue;
      if (!best || std::abs(m.first - target) < std::abs(best->first - target)) best = &m;
    }
    return best;
  };

  const auto* m1 = nearest(0.5 * T, 0.25 * T, 0.85 * T);
  if (!m1) throw NotConverged("dominant_weight_estimate: no mid-flow tracker mark");

  AsymptoticDirection out{RealSite(r.state.x.grid(), r.state.x.action().k), 0.0};
  out.xi = r.state.s;
  axpy(out.xi, -1.0, m1->second);
  scale(out.xi, 1.0 / (T - m1->first));

  RealSite e2(r.state.x.grid(), r.state.x.action().k);
  const auto* m2 = nearest(0.5 * m1->first, 0.1 * m1->first, 0.9 * m1->first);
  if (m2) {
    e2 = m1->second;
    axpy(e2, -1.0, m2->second);
    scale(e2, 1.0 / (m1->first - m2->first));
  } else if (r.t_begin == 0.0 && m1->first > 0.0) {
    e2 = m1->second;  // difference quotient from s(0) = 0
    scale(e2, 1.0 / m1->first);
  } else {
    throw NotConverged("dominant_weight_estimate: no early tracker mark");
  }

  RealSite diff = out.xi;
  axpy(diff, -1.0, e2);
  const double d = l2norm(diff);
  out.osc = d / std::max(l2norm(out.xi), abs_tol);
  if (d > std::max(rel_tol * l2norm(out.xi), abs_tol))
    throw NotConverged("dominant_weight_estimate: asymptotic direction still drifting");
  return out;
}

namespace {
struct LinReg {
  double slope = 0, intercept = 0, r2 = 0;
};
LinReg linreg(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinReg out;
  if (sxx <= 0.0 || syy <= 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (sxy * sxy) / (sxx * syy);
  return out;
}
}  // namespace

LojFit lojasiewicz_fit(const std::vector<double>& t, const std::vector<double>& f,
                       double f_inf) {
  if (t.size() != f.size() || t.size() < 4)
    throw InsufficientDecay("lojasiewicz_fit: series too short");

  std::vector<double> dt_, df_;
  double dmax = 0.0, dmin_pos = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double d = f[i] - f_inf;
    if (d <= 0.0) continue;
    dmax = std::max(dmax, d);
    dmin_pos = dmin_pos == 0.0 ? d : std::min(dmin_pos, d);
  }
  const double floor_ = std::max(1e-13 * std::max(std::abs(f_inf), dmax), 1e-300);
  if (dmax <= 0.0 || dmax / std::max(dmin_pos, floor_) < 1e3)
    throw InsufficientDecay("lojasiewicz_fit: value did not drop by 1e3");

  // window: below the initial transient, above the resolution floor
  const double hi = 0.02 * dmax;
  const double lo = std::max(30.0 * std::max(dmin_pos, floor_), 1e-280);
  for (size_t i = 0; i < t.size(); ++i) {
    const double d = f[i] - f_inf;
    if (d < lo || d > hi) continue;
    dt_.push_back(t[i]);
    df_.push_back(d);
  }
  if (dt_.size() < 8) {
    // fall back to a wider window for short synthetic series
    dt_.clear();
    df_.clear();
    for (size_t i = 0; i < t.size(); ++i) {
      const double d = f[i] - f_inf;
      if (d < std::max(10.0 * floor_, 1e-280) || d > 0.5 * dmax) continue;
      dt_.push_back(t[i]);
      df_.push_back(d);
    }
  }
  if (dt_.size() < 8) throw InsufficientDecay("lojasiewicz_fit: too few usable samples");

  std::vector<double> logd(dt_.size());
  for (size_t i = 0; i < dt_.size(); ++i) logd[i] = std::log(df_[i]);

  LinReg fit_exp = linreg(dt_, logd);

  LinReg fit_pow;
  bool pow_ok = true;
  {
    std::vector<double> logt;
    std::vector<double> logd2;
    for (size_t i = 0; i < dt_.size(); ++i) {
      if (dt_[i] <= 0.0) continue;
      logt.push_back(std::log(dt_[i]));
      logd2.push_back(logd[i]);
    }
    if (logt.size() < 8)
      pow_ok = false;
    else
      fit_pow = linreg(logt, logd2);
  }

  LojFit out;
  out.points = static_cast<int>(dt_.size());
  if (!pow_ok || fit_exp.r2 >= fit_pow.r2) {
    out.exponential = true;
    out.gamma = 0.5;
    out.rate = -fit_exp.slope;
    out.r2 = fit_exp.r2;
  } else {
    out.exponential = false;
    const double p = -fit_pow.slope;
    out.rate = p;
    out.gamma = (p > 0.0) ? 0.5 * (1.0 + 1.0 / p) : 1.0;
    out.r2 = fit_pow.r2;
  }
  return out;
}

std::vector<double> series_column(const std::vector<SeriesPoint>& s,
                                  double SeriesPoint::*member) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& p : s) out.push_back(p.*member);
  return out;
}

}  // namespace vortexflow
