#pragma once

// Independent reference computations for the tests. None of these call the
// library code they are used to check.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

/// Smallest singular value through Eigen's SVD.
inline double min_singular_value(double a, double b, double c, double d) {
  Eigen::Matrix2d m;
  m << a, b, c, d;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  return svd.singularValues()(1);
}

/// Same in long double, for products whose condition number defeats the
/// double-precision SVD.
inline long double min_singular_value_ld(const Eigen::Matrix<long double, 2, 2>& m) {
  Eigen::JacobiSVD<Eigen::Matrix<long double, 2, 2>> svd(m);
  return svd.singularValues()(1);
}

inline Eigen::Matrix<long double, 2, 2> mat_ld(double a, double b, double c, double d) {
  Eigen::Matrix<long double, 2, 2> m;
  m << a, b, c, d;
  return m;
}

inline Eigen::Matrix2d mat(double a, double b, double c, double d) {
  Eigen::Matrix2d m;
  m << a, b, c, d;
  return m;
}

/// Prefix lengths n whose prefix has every right-end segment mean >= lambda,
/// checked segment by segment.
inline std::vector<std::size_t> quasi_expanding_prefixes(const std::vector<double>& a, double lambda,
                                                         double tol = 1e-12) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    bool ok = true;
    for (std::size_t l = 1; l <= n && ok; ++l) {
      double s = 0;
      for (std::size_t j = n - l; j < n; ++j) s += a[j];
      ok = s / static_cast<double>(l) >= lambda - tol / static_cast<double>(l);
    }
    if (ok) out.push_back(n);
  }
  return out;
}

inline double mean(const std::vector<double>& a) {
  double s = 0;
  for (double x : a) s += x;
  return s / static_cast<double>(a.size());
}

/// Distance from x to the nearest k / (2^n - 1) on the circle.
inline double distance_to_doubling_periodic(double x, int n) {
  const double q = std::ldexp(1.0, n) - 1.0;
  const double k = std::round(x * q);
  const double t = std::abs(x - k / q);
  return std::min(t, 1.0 - t);
}

/// The doubling-map periodic point whose binary expansion repeats `bits`,
/// accurate to about 2^-60.
inline long double periodic_binary_point(const std::vector<int>& bits, std::size_t shift) {
  long double x = 0, w = 0.5L;
  const std::size_t tau = bits.size();
  for (std::size_t i = 0; i < 64; ++i, w *= 0.5L) x += w * bits[(shift + i) % tau];
  // the tail beyond 64 digits is below 2^-64
  return x;
}

/// Periodic orbit of the increasing piecewise-linear map with slope s1 on
/// [0, a) and s2 on [a, 1) (both branches onto [0, 1)) following the given
/// itinerary (0 = left piece): fixed point of the composed affine inverse
/// branches, solved in closed form.
inline long double pl_periodic_point(long double s1, long double s2, long double a,
                                     const std::vector<int>& word) {
  // inverse branches: g0(y) = y / s1, g1(y) = a + y / s2; compose
  // g_{w0} o g_{w1} o ... o g_{w_{n-1}} as y -> S y + B
  long double S = 1, B = 0;
  for (std::size_t i = word.size(); i-- > 0;) {
    const long double sl = word[i] == 0 ? s1 : s2;
    const long double off = word[i] == 0 ? 0.0L : a;
    // new map = g o old: y -> off + (S y + B) / sl
    B = off + B / sl;
    S = S / sl;
  }
  return B / (1.0L - S);
}

inline double circle_dist(double x, double y) {
  const double t = std::abs(x - y);
  const double u = t - std::floor(t);
  return std::min(u, 1.0 - u);
}

}  // namespace oracle
