#pragma once

// Linear maps on the tangent spaces: scalars for circle maps, 2x2 matrices
// for cocycles. Only what the estimators need: co-norm, operator norm and a
// renormalized running product.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "siftshadow/errors.hpp"

namespace siftshadow {

struct Mat2 {
  // row major: [[a, b], [c, d]]
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {}; }

  constexpr double det() const { return a * d - b * c; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  constexpr double max_abs_entry() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }

  Mat2 inverse() const {
    const double dt = det();
    if (dt == 0.0 || !std::isfinite(dt)) throw SingularMatrix();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest singular value.
inline double opnorm(const Mat2& m) {
  const double fro2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const double adet = std::abs(m.det());
  // fro2^2 - 4 det^2 factored to avoid cancellation
  const double disc = std::sqrt(std::max(0.0, (fro2 - 2.0 * adet) * (fro2 + 2.0 * adet)));
  return std::sqrt(0.5 * (fro2 + disc));
}
inline double opnorm(double s) { return std::abs(s); }

/// Co-norm (minimum norm) min_{|v|=1} |m v| = 1/|m^{-1}|.
/// For 2x2 it is |det| / sigma_max, which stays accurate for ill-conditioned m.
inline double conorm(const Mat2& m) {
  const double adet = std::abs(m.det());
  if (adet == 0.0 || !std::isfinite(adet)) throw SingularMatrix();
  return adet / opnorm(m);
}
inline double conorm(double s) {
  if (s == 0.0 || !std::isfinite(s)) throw SingularMatrix();
  return std::abs(s);
}

/// Running product A_{n-1} ... A_0 reporting log co-norm without overflow.
template <class L>
class LogConormProduct;

template <>
class LogConormProduct<double> {
 public:
  // |product| = m 2^e with m in [1, 2), kept exactly for power-of-two factors
  void push(double s) {
    int e = 0;
    m_ *= std::frexp(conorm(s), &e) * 2.0;
    exp_ += e - 1;
    if (m_ >= 2.0) {
      m_ *= 0.5;
      ++exp_;
    }
  }
  double log_conorm() const {
    return static_cast<double>(exp_) * std::numbers::ln2 + std::log(m_);
  }
  double log_norm() const { return log_conorm(); }

 private:
  double m_ = 1.0;
  long exp_ = 0;
};

template <>
class LogConormProduct<Mat2> {
 public:
  void push(const Mat2& step) {
    const double dt = std::abs(step.det());
    if (dt == 0.0 || !std::isfinite(dt)) throw SingularMatrix();
    log_det_ += std::log(dt);
    m_ = step * m_;
    // factor out the running max entry so the stored product stays O(1)
    const double s = m_.max_abs_entry();
    m_ = (1.0 / s) * m_;
    log_scale_ += std::log(s);
  }
  // |det P| = sigma_max * sigma_min, and log|det P| accumulates exactly.
  double log_conorm() const { return log_det_ - log_norm(); }
  double log_norm() const { return log_scale_ + std::log(opnorm(m_)); }
  const Mat2& normalized() const { return m_; }

 private:
  Mat2 m_ = Mat2::identity();
  double log_scale_ = 0.0;
  double log_det_ = 0.0;
};

}  // namespace siftshadow
