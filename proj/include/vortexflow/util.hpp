#pragma once
// Small shared utilities: error types and deterministic reductions.
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexflow {

// Base class for all structured errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct NonZeroMean : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };
struct NotCritical : Error { using Error::Error; };
struct NotUnstable : Error { using Error::Error; };
struct InsufficientDecay : Error { using Error::Error; };
struct DegenerateSamples : Error { using Error::Error; };
struct NewtonDiverged : Error { using Error::Error; };
struct RankAmbiguous : Error { using Error::Error; };
struct ViolationDetected : Error { using Error::Error; };

// Pairwise (binary-tree) summation: deterministic association order independent
// of traversal batching, and O(log n) roundoff growth.  All inner products and
// norms in the library reduce through this.
inline double pairwise_sum(const double* p, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace vortexflow
