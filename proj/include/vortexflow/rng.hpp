#pragma once
// Counter-based random number generation (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, counter), so initialization
// is reproducible bit-for-bit regardless of traversal order or thread count.
#include <cmath>
#include <cstdint>

namespace vortexflow {

namespace detail {
inline void philox_round(uint32_t c[4], uint32_t k0, uint32_t k1) {
  constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  uint64_t p0 = static_cast<uint64_t>(M0) * c[0];
  uint64_t p1 = static_cast<uint64_t>(M1) * c[2];
  uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  uint32_t n0 = hi1 ^ c[1] ^ k0;
  uint32_t n1 = lo1;
  uint32_t n2 = hi0 ^ c[3] ^ k1;
  uint32_t n3 = lo0;
  c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
}
}  // namespace detail

// One 128-bit Philox block keyed by (seed) with counter (stream, ctr).
inline void philox_block(uint64_t seed, uint64_t stream, uint64_t ctr,
                         uint32_t out[4]) {
  constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  uint32_t k0 = static_cast<uint32_t>(seed);
  uint32_t k1 = static_cast<uint32_t>(seed >> 32);
  uint32_t c[4] = {static_cast<uint32_t>(ctr), static_cast<uint32_t>(ctr >> 32),
                   static_cast<uint32_t>(stream),
                   static_cast<uint32_t>(stream >> 32)};
  for (int r = 0; r < 10; ++r) {
    detail::philox_round(c, k0, k1);
    k0 += W0; k1 += W1;
  }
  out[0] = c[0]; out[1] = c[1]; out[2] = c[2]; out[3] = c[3];
}

struct CounterRng {
  uint64_t seed = 0;

  // Uniform in [0,1) with 53 random bits.
  double uniform(uint64_t stream, uint64_t ctr) const {
    uint32_t b[4];
    philox_block(seed, stream, ctr, b);
    uint64_t bits = ((static_cast<uint64_t>(b[0]) << 32) | b[1]) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one block yields the pair, we return the
  // first and keep draws independent by using distinct counters.
  double gaussian(uint64_t stream, uint64_t ctr) const {
    uint32_t b[4];
    philox_block(seed, stream, ctr, b);
    uint64_t u1b = ((static_cast<uint64_t>(b[0]) << 32) | b[1]) >> 11;
    uint64_t u2b = ((static_cast<uint64_t>(b[2]) << 32) | b[3]) >> 11;
    double u1 = (static_cast<double>(u1b) + 1.0) * 0x1.0p-53;  // (0,1]
    double u2 = static_cast<double>(u2b) * 0x1.0p-53;          // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }
};

}  // namespace vortexflow
