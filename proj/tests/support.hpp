#pragma once

// Shared helpers for the test suite: deterministic random field fills and
// sup-norm comparisons.

#include <cmath>
#include <cstdint>

#include "vortexflow/fields.hpp"
#include "vortexflow/lattice.hpp"
#include "vortexflow/rng.hpp"

namespace vtest {

using namespace vortexflow;

// Uniform entries in [-1, 1]; raw white noise (operator identities do not
// need smooth fields).
inline void fill(RealSite& f, uint64_t seed, uint64_t stream = 1) {
  CounterRng rng{seed};
  for (size_t m = 0; m < f.v.size(); ++m)
    f.v[m] = 2.0 * rng.uniform(stream, m) - 1.0;
}

inline void fill(RealPlaq& f, uint64_t seed, uint64_t stream = 2) {
  CounterRng rng{seed};
  for (size_t m = 0; m < f.v.size(); ++m)
    f.v[m] = 2.0 * rng.uniform(stream, m) - 1.0;
}

inline void fill(RealLink& f, uint64_t seed, uint64_t stream = 3) {
  CounterRng rng{seed};
  for (size_t m = 0; m < f.vx.size(); ++m)
    f.vx[m] = 2.0 * rng.uniform(stream, 2 * m) - 1.0;
  for (size_t m = 0; m < f.vy.size(); ++m)
    f.vy[m] = 2.0 * rng.uniform(stream, 2 * m + 1) - 1.0;
}

inline void fill(CSite& f, uint64_t seed, uint64_t stream = 4) {
  CounterRng rng{seed};
  for (size_t m = 0; m < f.v.size(); ++m)
    f.v[m] = cdouble(2.0 * rng.uniform(stream, 2 * m) - 1.0,
                     2.0 * rng.uniform(stream, 2 * m + 1) - 1.0);
}

inline double sup_diff(const RealSite& a, const RealSite& b) {
  double m = 0;
  for (size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

inline double sup_diff(const RealPlaq& a, const RealPlaq& b) {
  double m = 0;
  for (size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

inline double sup_diff(const RealLink& a, const RealLink& b) {
  double m = 0;
  for (size_t i = 0; i < a.vx.size(); ++i)
    m = std::max(m, std::abs(a.vx[i] - b.vx[i]));
  for (size_t i = 0; i < a.vy.size(); ++i)
    m = std::max(m, std::abs(a.vy[i] - b.vy[i]));
  return m;
}

inline double sup_diff(const CSite& a, const CSite& b) {
  double m = 0;
  for (size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

inline double sup_diff(const Pair& a, const Pair& b) {
  return std::max(sup_diff(a.A.a, b.A.a), sup_diff(a.u.u, b.u.u));
}

inline double sup_abs(const RealSite& a) {
  double m = 0;
  for (double v : a.v) m = std::max(m, std::abs(v));
  return m;
}

// One-component action: U(1) with weight 1 on C.
inline ActionSpec u1_spec(double tau, int degree = 0) {
  return ActionSpec(1, 1, {1}, {tau}, {degree});
}

}  // namespace vtest
