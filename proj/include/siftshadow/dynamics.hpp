#pragma once

// Orbits, derivative cocycles and exponent estimators, generic over the map
// system (circle maps and matrix cocycles).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "siftshadow/errors.hpp"
#include "siftshadow/linalg.hpp"

namespace siftshadow {

template <class S>
concept MapSystem = requires(const S& s, const typename S::point_type& p) {
  typename S::point_type;
  typename S::linear_map;
  { s.step(p) } -> std::convertible_to<typename S::point_type>;
  { s.derivative(p) } -> std::convertible_to<typename S::linear_map>;
  { s.distance(p, p) } -> std::convertible_to<double>;
  { s.inverse_branches(p) } -> std::convertible_to<std::vector<typename S::point_type>>;
  { s.lipschitz_bound() } -> std::convertible_to<double>;
  { s.degree() } -> std::convertible_to<int>;
};

/// Finite-precision stand-ins for the exact comparisons of the theory.
struct Tolerances {
  double eval = 1e-10;  // recomputing increments
  double per = 1e-9;    // periodicity defect
  double inv = 1e-10;   // f(preimage) == point
  double mono = 1e-9;   // monotonicity of doubling-scale averages
};

template <class S>
double log_conorm_at(const S& sys, const typename S::point_type& x) {
  return std::log(conorm(sys.derivative(x)));
}

/// Orbit segment (x, f(x), ..., f^k(x)) with a_i = log |D_{f^i x} f|_co.
template <class P>
struct OrbitString {
  std::vector<P> points;          // k + 1 points
  std::vector<double> increments;  // k values

  std::size_t length() const noexcept { return increments.size(); }
  const P& base() const { return points.front(); }
  const P& end_point() const { return points.back(); }
  double sum() const {
    long double s = 0;
    for (double a : increments) s += a;
    return static_cast<double>(s);
  }
};

template <MapSystem S>
OrbitString<typename S::point_type> orbit_string(const S& sys, const typename S::point_type& x,
                                                 std::size_t k) {
  if (k < 1) throw BadParameters("orbit strings have length >= 1");
  OrbitString<typename S::point_type> s;
  s.points.reserve(k + 1);
  s.increments.reserve(k);
  s.points.push_back(x);
  for (std::size_t i = 0; i < k; ++i) {
    s.increments.push_back(log_conorm_at(sys, s.points.back()));
    s.points.push_back(sys.step(s.points.back()));
  }
  return s;
}

/// Orbit string over precomputed points (e.g. an orbit built from inverse
/// branches); increments are taken at points[0..k-1].
template <MapSystem S>
OrbitString<typename S::point_type> orbit_string_from_points(
    const S& sys, std::span<const typename S::point_type> points) {
  if (points.size() < 2) throw BadParameters("orbit strings have length >= 1");
  OrbitString<typename S::point_type> s;
  s.points.assign(points.begin(), points.end());
  s.increments.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    s.increments.push_back(log_conorm_at(sys, points[i]));
  return s;
}

/// Largest |f(z_j) - z_{j+1}| around a cyclic orbit.
template <MapSystem S>
double cyclic_defect(const S& sys, std::span<const typename S::point_type> orbit) {
  double worst = 0.0;
  for (std::size_t j = 0; j < orbit.size(); ++j)
    worst = std::max(worst, sys.distance(sys.step(orbit[j]), orbit[(j + 1) % orbit.size()]));
  return worst;
}

/// log |D_x f^k|_co for k = 1..kmax.
template <MapSystem S>
std::vector<double> log_conorm_profile(const S& sys, typename S::point_type x, std::size_t kmax) {
  LogConormProduct<typename S::linear_map> prod;
  std::vector<double> out;
  out.reserve(kmax);
  for (std::size_t k = 0; k < kmax; ++k) {
    prod.push(sys.derivative(x));
    out.push_back(prod.log_conorm());
    x = sys.step(x);
  }
  return out;
}

enum class ExponentScheme { birkhoff, kingman_doubling };

inline const char* to_string(ExponentScheme s) {
  return s == ExponentScheme::birkhoff ? "birkhoff" : "kingman_doubling";
}

struct ExponentEstimate {
  double value = 0.0;  // nats per iterate
  std::size_t horizon = 0;
  ExponentScheme scheme = ExponentScheme::birkhoff;
  // max of (1/h') log|D f^{h'}|_co over the trailing window of 8 horizons
  // ending at `horizon`; stands in for the limsup
  double limsup_proxy = 0.0;
};

/// (1/h) log |D_x f^h|_co by composing derivatives with renormalization.
template <MapSystem S>
ExponentEstimate min_lyapunov_estimate(const S& sys, typename S::point_type x,
                                       std::size_t horizon) {
  if (horizon < 1) throw BadParameters("horizon must be >= 1");
  constexpr std::size_t window = 8;
  LogConormProduct<typename S::linear_map> prod;
  ExponentEstimate e;
  e.horizon = horizon;
  e.limsup_proxy = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t <= horizon; ++t) {
    prod.push(sys.derivative(x));
    x = sys.step(x);
    if (t + window > horizon) {
      e.limsup_proxy = std::max(e.limsup_proxy, prod.log_conorm() / static_cast<double>(t));
    }
  }
  e.value = prod.log_conorm() / static_cast<double>(horizon);
  return e;
}

/// Averages (1/k) sum_j (1/t) log |D_{f^{jt} x} f^t|_co at the doubling time
/// scales t = t1 2^l, l = 0..levels-1, along the orbit given by its points.
/// Every level covers the same span of blocks * t1 * 2^{levels-1} iterates
/// (so the coarsest level has `blocks` blocks); with a super-multiplicative
/// co-norm the levels are then nondecreasing.
template <MapSystem S>
std::vector<ExponentEstimate> kingman_doubling_average_along(
    const S& sys, std::span<const typename S::point_type> orbit, std::size_t t1, std::size_t levels,
    std::size_t blocks) {
  if (t1 < 1 || levels < 1 || blocks < 1) throw BadParameters("t1, levels, blocks must be >= 1");
  if (levels > 40) throw BadParameters("too many levels");
  const std::size_t span = blocks * t1 * (std::size_t{1} << (levels - 1));
  if (orbit.size() < span) throw BadParameters("orbit is shorter than the averaging span");
  std::vector<typename S::linear_map> derivs;
  derivs.reserve(span);
  for (std::size_t i = 0; i < span; ++i) derivs.push_back(sys.derivative(orbit[i]));
  std::vector<ExponentEstimate> out;
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t t = t1 << l;
    const std::size_t k = span / t;
    // Neumaier summation: k equal block values must average back to that value
    long double acc = 0, comp = 0;
    for (std::size_t j = 0; j < k; ++j) {
      LogConormProduct<typename S::linear_map> prod;
      for (std::size_t i = 0; i < t; ++i) prod.push(derivs[j * t + i]);
      const long double x = prod.log_conorm() / static_cast<double>(t);
      const long double s = acc + x;
      comp += std::abs(acc) >= std::abs(x) ? (acc - s) + x : (x - s) + acc;
      acc = s;
    }
    ExponentEstimate e;
    e.value = static_cast<double>((acc + comp) / static_cast<long double>(k));
    e.horizon = t;
    e.scheme = ExponentScheme::kingman_doubling;
    e.limsup_proxy = e.value;
    out.push_back(e);
  }
  return out;
}

/// As above along the forward orbit of x.
template <MapSystem S>
std::vector<ExponentEstimate> kingman_doubling_average(const S& sys, typename S::point_type x,
                                                       std::size_t t1, std::size_t levels,
                                                       std::size_t blocks) {
  if (t1 < 1 || levels < 1 || blocks < 1) throw BadParameters("t1, levels, blocks must be >= 1");
  if (levels > 40) throw BadParameters("too many levels");
  const std::size_t span = blocks * t1 * (std::size_t{1} << (levels - 1));
  std::vector<typename S::point_type> orbit;
  orbit.reserve(span);
  for (std::size_t i = 0; i < span; ++i) {
    orbit.push_back(x);
    x = sys.step(x);
  }
  return kingman_doubling_average_along(sys, std::span<const typename S::point_type>(orbit), t1,
                                        levels, blocks);
}

template <class P>
struct PeriodicPoint {
  P point;
  int period = 1;
};

/// Birkhoff average of log co-norm over one period of p.
template <MapSystem S>
double periodic_average(const S& sys, const typename S::point_type& p, int period,
                        const Tolerances& tol = {}) {
  if (period < 1) throw BadParameters("period must be >= 1");
  auto y = p;
  long double sum = 0;
  for (int i = 0; i < period; ++i) {
    sum += log_conorm_at(sys, y);
    y = sys.step(y);
  }
  const double defect = sys.distance(y, p);
  if (!(defect <= tol.per)) {
    if constexpr (std::is_same_v<typename S::point_type, double>)
      throw NotPeriodic(p, period, defect);
    else
      throw NotPeriodic(std::numeric_limits<double>::quiet_NaN(), period, defect);
  }
  return static_cast<double>(sum / period);
}

/// min over the supplied periodic points of their one-period Birkhoff
/// average of log co-norm. Positive means expansion on the sample.
template <MapSystem S>
double expansion_indicator_over_set(const S& sys,
                                    std::span<const PeriodicPoint<typename S::point_type>> points,
                                    const Tolerances& tol = {}) {
  if (points.empty()) throw BadParameters("no periodic points supplied");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pp : points) best = std::min(best, periodic_average(sys, pp.point, pp.period, tol));
  return best;
}

}  // namespace siftshadow
