#pragma once

// Locally constant 2x2 matrix cocycles over the one-sided full shift on
// {0, 1}. A point is a driving word plus a position in it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "siftshadow/circle_map.hpp"
#include "siftshadow/errors.hpp"
#include "siftshadow/linalg.hpp"
#include "siftshadow/random.hpp"

namespace siftshadow {

struct ShiftPoint {
  std::shared_ptr<const std::vector<std::uint8_t>> word;
  std::size_t pos = 0;
  bool periodic = false;  // word repeats forever; otherwise finite

  std::uint8_t symbol(std::size_t offset = 0) const {
    const std::size_t i = pos + offset;
    if (periodic) return (*word)[i % word->size()];
    if (i >= word->size()) throw BadParameters("orbit runs past the end of a finite driving word");
    return (*word)[i];
  }
  std::size_t remaining() const { return periodic ? SIZE_MAX : word->size() - pos; }
};

inline ShiftPoint make_shift_point(std::vector<std::uint8_t> word, bool periodic,
                                   std::size_t pos = 0) {
  if (word.empty()) throw BadParameters("empty driving word");
  for (auto s : word)
    if (s > 1) throw BadParameters("driving words are over {0, 1}");
  return {std::make_shared<const std::vector<std::uint8_t>>(std::move(word)), pos, periodic};
}

inline ShiftPoint random_shift_point(std::size_t length, Rng& rng) {
  std::vector<std::uint8_t> w(length);
  for (auto& s : w) s = static_cast<std::uint8_t>(rng() >> 63);
  return make_shift_point(std::move(w), false);
}

class MatrixCocycle {
 public:
  using point_type = ShiftPoint;
  using linear_map = Mat2;

  MatrixCocycle(MapDescriptor desc, Mat2 s0, Mat2 s1) : desc_(std::move(desc)), s_{s0, s1} {
    for (const auto& m : s_) {
      if (m.det() == 0.0) throw SingularMatrix("cocycle generator is singular");
      k_ = std::max({k_, opnorm(m), opnorm(m.inverse())});
    }
  }

  const MapDescriptor& descriptor() const noexcept { return desc_; }
  int degree() const noexcept { return 2; }
  double lipschitz_bound() const noexcept { return k_; }
  const Mat2& generator(int i) const { return s_.at(i); }

  ShiftPoint step(const ShiftPoint& p) const {
    ShiftPoint q = p;
    q.pos += 1;
    if (q.periodic) q.pos %= q.word->size();
    return q;
  }
  Mat2 derivative(const ShiftPoint& p) const { return s_[p.symbol()]; }

  /// Shift-space metric 2^{-n}, n the first index where the sequences differ
  /// (compared over at most 64 symbols).
  double distance(const ShiftPoint& x, const ShiftPoint& y) const {
    for (std::size_t i = 0; i < 64; ++i) {
      if (i >= x.remaining() || i >= y.remaining()) return 0.0;
      if (x.symbol(i) != y.symbol(i)) return std::ldexp(1.0, -static_cast<int>(i));
    }
    return 0.0;
  }

  /// The two sequences s x for s in {0, 1}. A periodic tail is unrolled
  /// into a finite word of 64 periods.
  std::vector<ShiftPoint> inverse_branches(const ShiftPoint& p) const {
    const std::size_t n = p.periodic ? 64 * p.word->size() : p.remaining();
    std::vector<ShiftPoint> out;
    for (std::uint8_t s = 0; s < 2; ++s) {
      std::vector<std::uint8_t> w;
      w.reserve(n + 1);
      w.push_back(s);
      for (std::size_t i = 0; i < n; ++i) w.push_back(p.symbol(i));
      out.push_back(make_shift_point(std::move(w), false));
    }
    return out;
  }

 private:
  MapDescriptor desc_;
  std::array<Mat2, 2> s_;
  double k_ = 1.0;
};

/// The family S0 = alpha [[1, -1], [0, 1]], S1 = gamma [[1, 0], [-1, 1]].
inline MatrixCocycle bm_cocycle(double alpha, double gamma) {
  if (!(alpha > 1.0 && gamma > 1.0)) throw BadParameters("bm_cocycle needs alpha, gamma > 1");
  return MatrixCocycle({"bm_cocycle", {alpha, gamma}}, alpha * Mat2{1, -1, 0, 1},
                       gamma * Mat2{1, 0, -1, 1});
}

}  // namespace siftshadow
