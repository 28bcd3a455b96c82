#pragma once

// All randomness flows from one std::mt19937_64 seeded by the caller. The
// standard distributions are implementation defined, so the few draws we
// need are derived from the raw 64-bit output directly.

#include <cstdint>
#include <random>

namespace siftshadow {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Integer in [0, n), n >= 1.
inline std::uint64_t below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

}  // namespace siftshadow
