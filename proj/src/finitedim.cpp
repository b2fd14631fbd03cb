#include "vortexflow/finitedim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "vortexflow/rng.hpp"

namespace vortexflow {
namespace fd {

namespace {

double re_dot(const CVec& a, const CVec& b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j)
    s += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
  return s;
}

CVec& axpy(CVec& y, double alpha, const CVec& x) {
  for (size_t j = 0; j < y.size(); ++j) y[j] += alpha * x[j];
  return y;
}

}  // namespace

Vec fd_moment(const ActionSpec& spec, const CVec& x) {
  Vec mu(spec.k);
  for (int a = 0; a < spec.k; ++a) {
    double s = 0.0;
    for (int j = 0; j < spec.n; ++j) s += spec.w(a, j) * std::norm(x[j]);
    mu[a] = 0.5 * s - spec.tau[a];
  }
  return mu;
}

double fd_value(const ActionSpec& spec, const CVec& x) {
  double s = 0.0;
  for (double m : fd_moment(spec, x)) s += m * m;
  return 0.5 * s;
}

CVec fd_grad(const ActionSpec& spec, const CVec& x) {
  const Vec mu = fd_moment(spec, x);
  CVec g(spec.n);
  for (int j = 0; j < spec.n; ++j) g[j] = spec.wdot(j, mu.data()) * x[j];
  return g;
}

CVec fd_hess_apply(const ActionSpec& spec, const CVec& x, const CVec& d) {
  const Vec mu = fd_moment(spec, x);
  CVec h(spec.n);
  for (int j = 0; j < spec.n; ++j) {
    h[j] = spec.wdot(j, mu.data()) * d[j];
    for (int l = 0; l < spec.n; ++l) {
      double G = 0.0;
      for (int a = 0; a < spec.k; ++a) G += spec.w(a, j) * spec.w(a, l);
      h[j] += G * (x[l].real() * d[l].real() + x[l].imag() * d[l].imag()) * x[j];
    }
  }
  return h;
}

double fd_norm(const CVec& x) { return std::sqrt(re_dot(x, x)); }

FdFlowResult fd_flow(const ActionSpec& spec, const CVec& x0,
                     const FdFlowConfig& cfg) {
  FdFlowResult R;
  R.x = x0;
  R.s.assign(spec.k, 0.0);

  auto grad_norm = [&](const CVec& x) { return fd_norm(fd_grad(spec, x)); };

  double dt = cfg.dt0;
  double fval = fd_value(spec, R.x);
  R.series.push_back({0.0, fval, grad_norm(R.x)});

  while (R.t < cfg.t_max && R.steps < cfg.max_steps) {
    R.grad_norm = grad_norm(R.x);
    if (R.grad_norm <= cfg.grad_tol) {
      R.converged = true;
      break;
    }
    double dt_try = std::min(dt, cfg.t_max - R.t);
    CVec xn;
    Vec sn;
    double fn = 0.0;
    for (;;) {
      // RK4 stages for dx/dt = -grad F and ds/dt = -mu
      CVec k1 = fd_grad(spec, R.x);
      CVec x2 = R.x;
      axpy(x2, -0.5 * dt_try, k1);
      CVec k2 = fd_grad(spec, x2);
      CVec x3 = R.x;
      axpy(x3, -0.5 * dt_try, k2);
      CVec k3 = fd_grad(spec, x3);
      CVec x4 = R.x;
      axpy(x4, -dt_try, k3);
      CVec k4 = fd_grad(spec, x4);

      xn = R.x;
      for (int j = 0; j < spec.n; ++j)
        xn[j] -= dt_try / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

      const Vec m1 = fd_moment(spec, R.x), m2 = fd_moment(spec, x2),
                m3 = fd_moment(spec, x3), m4 = fd_moment(spec, x4);
      sn = R.s;
      for (int a = 0; a < spec.k; ++a)
        sn[a] -= dt_try / 6.0 * (m1[a] + 2.0 * m2[a] + 2.0 * m3[a] + m4[a]);

      fn = fd_value(spec, xn);
      if (!cfg.adaptive || fn <= fval + 1e-14 * std::max(1.0, fval)) break;
      dt_try *= 0.5;
      if (dt_try < cfg.dt_min) break;
    }
    if (cfg.adaptive && dt_try < cfg.dt_min) break;  // stalled: partial report

    R.x = std::move(xn);
    R.s = std::move(sn);
    fval = fn;
    R.t += dt_try;
    ++R.steps;
    dt = cfg.adaptive ? std::min(dt_try * cfg.dt_grow, cfg.dt_max) : cfg.dt0;
    R.series.push_back({R.t, fval, grad_norm(R.x)});
  }

  R.value = fval;
  R.grad_norm = grad_norm(R.x);
  if (R.grad_norm <= cfg.grad_tol) R.converged = true;
  const Vec mu = fd_moment(spec, R.x);
  R.xi.assign(spec.k, 0.0);
  for (int a = 0; a < spec.k; ++a) R.xi[a] = -mu[a];
  return R;
}

FdWeight fd_weight(const ActionSpec& spec, const CVec& x, const Vec& xi) {
  const double zero_tol = 1e-12;
  FdWeight w;
  CVec xplus(spec.n, cdouble{0.0, 0.0});
  for (int j = 0; j < spec.n; ++j) {
    if (std::abs(x[j]) == 0.0) continue;
    const double dot = spec.wdot(j, xi.data());
    if (dot > zero_tol) {
      w.finite = false;
      return w;
    }
    if (std::abs(dot) <= zero_tol) xplus[j] = x[j];
  }
  const Vec mu = fd_moment(spec, xplus);
  w.value = 0.0;
  for (int a = 0; a < spec.k; ++a) w.value += mu[a] * xi[a];
  return w;
}

double fd_weight_ray(const ActionSpec& spec, const CVec& x, const Vec& xi,
                     double t_max) {
  CVec xt(spec.n);
  for (int j = 0; j < spec.n; ++j)
    xt[j] = x[j] * std::exp(t_max * spec.wdot(j, xi.data()));
  const Vec mu = fd_moment(spec, xt);
  double v = 0.0;
  for (int a = 0; a < spec.k; ++a) v += mu[a] * xi[a];
  return v;
}

namespace {

Vec normalized(Vec v) {
  double n = 0.0;
  for (double c : v) n += c * c;
  n = std::sqrt(n);
  for (double& c : v) c /= n;
  return v;
}

}  // namespace

FdDominant fd_dominant_weight_bruteforce(const ActionSpec& spec, const CVec& x,
                                         int grid, double tol) {
  std::vector<Vec> probes;
  if (spec.k == 1) {
    probes.push_back({1.0});
    probes.push_back({-1.0});
  } else if (spec.k == 2) {
    for (int m = 0; m < grid; ++m) {
      const double th = 2.0 * M_PI * m / grid;
      probes.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    CounterRng rng(2024);
    const int M = std::max(grid * 4, 2000);
    for (int m = 0; m < M; ++m) {
      Vec v(spec.k);
      for (int a = 0; a < spec.k; ++a)
        v[a] = rng.gaussian(7, static_cast<uint64_t>(m) * spec.k + a);
      probes.push_back(normalized(std::move(v)));
    }
    for (int a = 0; a < spec.k; ++a) {
      Vec e(spec.k, 0.0);
      e[a] = 1.0;
      probes.push_back(e);
      e[a] = -1.0;
      probes.push_back(e);
    }
  }

  bool found = false;
  FdDominant best;
  best.value = -1e300;
  for (const auto& xi : probes) {
    const FdWeight w = fd_weight(spec, x, xi);
    if (!w.finite) continue;
    found = true;
    if (-w.value > best.value) {
      best.value = -w.value;
      best.xi = xi;
    }
  }
  if (!found || best.value <= tol)
    throw NotUnstable("fd_dominant_weight_bruteforce: all finite weights >= -tol");

  if (spec.k > 1) {
    double step = 0.05;
    while (step > 1e-13) {
      bool improved = false;
      for (int a = 0; a < spec.k; ++a)
        for (double sgn : {1.0, -1.0}) {
          Vec cand = best.xi;
          cand[a] += sgn * step;
          cand = normalized(std::move(cand));
          const FdWeight w = fd_weight(spec, x, cand);
          if (w.finite && -w.value > best.value) {
            best.value = -w.value;
            best.xi = std::move(cand);
            improved = true;
          }
        }
      if (!improved) step *= 0.7;
    }
  }
  return best;
}

namespace {

CVec real_index_dir(int n, int m) {
  CVec d(n, cdouble{0.0, 0.0});
  if (m < n)
    d[m] = 1.0;
  else
    d[m - n] = cdouble{0.0, 1.0};
  return d;
}

CVec from_real(const Eigen::VectorXd& r, int n) {
  CVec z(n);
  for (int j = 0; j < n; ++j) z[j] = cdouble{r[j], r[n + j]};
  return z;
}

}  // namespace

FdReduced fd_reduced_setup(const ActionSpec& spec, const CVec& x_c,
                           double rank_tol) {
  if (fd_norm(fd_grad(spec, x_c)) > 1e-10)
    throw NotCritical("fd_reduced_setup: base point is not critical");

  const int n = spec.n, N = 2 * n;
  Eigen::MatrixXd H(N, N);
  for (int m = 0; m < N; ++m) {
    const CVec col = fd_hess_apply(spec, x_c, real_index_dir(n, m));
    for (int j = 0; j < n; ++j) {
      H(j, m) = col[j].real();
      H(n + j, m) = col[j].imag();
    }
  }
  H = 0.5 * (H + H.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  FdReduced red;
  red.x_c = x_c;
  for (int m = 0; m < N; ++m) {
    const double lam = es.eigenvalues()[m];
    red.evals.push_back(lam);
    if (std::abs(lam) > rank_tol / 10.0 && std::abs(lam) < rank_tol * 10.0)
      throw RankAmbiguous("fd_reduced_setup: Hessian eigenvalue " +
                          std::to_string(lam) + " inside the tolerance window");
    CVec v = from_real(es.eigenvectors().col(m), n);
    if (std::abs(lam) <= rank_tol)
      red.kernel.push_back(std::move(v));
    else
      red.range.push_back(std::move(v));
  }
  return red;
}

CVec fd_reduced_point(const ActionSpec& spec, const FdReduced& red, const Vec& y,
                      CVec* out_phi, int max_newton) {
  if (y.size() != red.kernel.size())
    throw ConfigError("fd_reduced_point: coordinate count != kernel dimension");
  CVec x0 = red.x_c;
  for (size_t b = 0; b < y.size(); ++b) axpy(x0, y[b], red.kernel[b]);

  const int R = static_cast<int>(red.range.size());
  if (R == 0) {
    if (out_phi) out_phi->assign(spec.n, cdouble{0.0, 0.0});
    return x0;
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(R);
  CVec x = x0;
  for (int it = 0; it <= max_newton; ++it) {
    x = x0;
    for (int r = 0; r < R; ++r) axpy(x, c[r], red.range[r]);
    const CVec g = fd_grad(spec, x);
    Eigen::VectorXd rho(R);
    for (int r = 0; r < R; ++r) rho[r] = re_dot(red.range[r], g);
    if (rho.norm() <= 1e-12) break;
    if (it == max_newton || !std::isfinite(rho.norm()) || c.norm() > 1e6)
      throw NewtonDiverged("fd_reduced_point: corrector did not converge");

    Eigen::MatrixXd J(R, R);
    for (int s = 0; s < R; ++s) {
      const CVec hs = fd_hess_apply(spec, x, red.range[s]);
      for (int r = 0; r < R; ++r) J(r, s) = re_dot(red.range[r], hs);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible())
      throw NewtonDiverged("fd_reduced_point: singular corrector Jacobian");
    c -= lu.solve(rho);
  }

  if (out_phi) {
    out_phi->assign(spec.n, cdouble{0.0, 0.0});
    for (int r = 0; r < R; ++r) axpy(*out_phi, c[r], red.range[r]);
  }
  return x;
}

double fd_reduced_value(const ActionSpec& spec, const FdReduced& red, const Vec& y) {
  return fd_value(spec, fd_reduced_point(spec, red, y));
}

Vec fd_reduced_grad(const ActionSpec& spec, const FdReduced& red, const Vec& y) {
  const CVec g = fd_grad(spec, fd_reduced_point(spec, red, y));
  Vec out(red.kernel.size());
  for (size_t b = 0; b < red.kernel.size(); ++b) out[b] = re_dot(red.kernel[b], g);
  return out;
}

FdLoj fd_lojasiewicz_probe(const ActionSpec& spec, const CVec& x_c, double r_lo,
                           double r_hi, int shells, int per_shell, uint64_t seed) {
  const double F_c = fd_value(spec, x_c);
  CounterRng rng(seed);
  std::vector<double> X, Y;

  for (int sh = 0; sh < shells; ++sh) {
    const double r =
        r_lo * std::pow(r_hi / r_lo, shells > 1 ? double(sh) / (shells - 1) : 0.0);
    bool shell_alive = false;
    for (int m = 0; m < per_shell; ++m) {
      CVec d(spec.n);
      for (int j = 0; j < spec.n; ++j) {
        const uint64_t ctr = (static_cast<uint64_t>(sh * per_shell + m) << 8) | j;
        d[j] = cdouble{rng.gaussian(11, 2 * ctr), rng.gaussian(11, 2 * ctr + 1)};
      }
      const double dn = fd_norm(d);
      CVec x = x_c;
      for (int j = 0; j < spec.n; ++j) x[j] += (r / dn) * d[j];
      const double df = std::abs(fd_value(spec, x) - F_c);
      const double gn = fd_norm(fd_grad(spec, x));
      if (df <= 1e-300 || gn <= 0.0) continue;
      shell_alive = true;
      X.push_back(std::log(df));
      Y.push_back(std::log(gn));
    }
    if (!shell_alive)
      throw DegenerateSamples("fd_lojasiewicz_probe: value constant on shell " +
                              std::to_string(sh));
  }

  double mx = 0, my = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= X.size();
  my /= X.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
    syy += (Y[i] - my) * (Y[i] - my);
  }
  if (sxx < 1e-8)
    throw DegenerateSamples("fd_lojasiewicz_probe: no spread in sampled values");

  FdLoj fit;
  fit.gamma = sxy / sxx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
  fit.samples = static_cast<int>(X.size());
  double min_log_c = 1e300;
  for (size_t i = 0; i < X.size(); ++i)
    min_log_c = std::min(min_log_c, Y[i] - fit.gamma * X[i]);
  fit.constant = std::exp(min_log_c);
  if (fit.gamma >= 1.0)
    throw ViolationDetected("fd_lojasiewicz_probe: fitted exponent " +
                            std::to_string(fit.gamma) + " >= 1");
  return fit;
}

}  // namespace fd
}  // namespace vortexflow
