#pragma once

// Depth-d truncations of the inverse limit of a noninvertible map: points
// (x_0, x_{-1}, ..., x_{-d}) with f(x_{-i-1}) = x_{-i}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siftshadow/dynamics.hpp"
#include "siftshadow/errors.hpp"
#include "siftshadow/strings.hpp"

namespace siftshadow {

inline constexpr std::size_t kMaxBranches = std::size_t{1} << 20;

template <class P>
struct BackwardBranch {
  P present;
  std::vector<P> history;  // x_{-1}, ..., x_{-d}

  std::size_t depth() const noexcept { return history.size(); }
  /// x_{-i} for i = 0..depth.
  const P& at(std::size_t i) const { return i == 0 ? present : history[i - 1]; }
  const P& projection() const { return present; }
};

/// All q^depth backward branches of x, in lexicographic order of the
/// inverse-branch indices (present first).
template <MapSystem S>
std::vector<BackwardBranch<typename S::point_type>> enumerate_branches(
    const S& sys, const typename S::point_type& x, std::size_t depth) {
  using P = typename S::point_type;
  const auto q = static_cast<std::size_t>(sys.degree());
  std::size_t count = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    if (count > kMaxBranches / q) throw DepthTooLarge("more than 2^20 branches at depth " + std::to_string(depth));
    count *= q;
  }
  std::vector<BackwardBranch<P>> level{{x, {}}};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<BackwardBranch<P>> next;
    next.reserve(level.size() * q);
    for (const auto& b : level) {
      for (auto& y : sys.inverse_branches(b.depth() == 0 ? b.present : b.history.back())) {
        BackwardBranch<P> nb = b;
        nb.history.push_back(std::move(y));
        next.push_back(std::move(nb));
      }
    }
    level = std::move(next);
  }
  return level;
}

/// Largest d(f(x_{-i-1}), x_{-i}) along the branch.
template <MapSystem S>
double branch_defect(const S& sys, const BackwardBranch<typename S::point_type>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.depth(); ++i)
    worst = std::max(worst, sys.distance(sys.step(b.at(i + 1)), b.at(i)));
  return worst;
}

struct MetricValue {
  double value = 0.0;
  std::size_t depth = 0;             // terms summed: i = 0..depth
  double truncation_bound = 0.0;     // 2^{-depth}, bound on the omitted tail
};

/// sum_{i=0..d} 2^{-i} min(1, d(x_{-i}, y_{-i})), d the smaller depth.
template <MapSystem S>
MetricValue extension_metric(const S& sys, const BackwardBranch<typename S::point_type>& a,
                             const BackwardBranch<typename S::point_type>& b) {
  MetricValue m;
  m.depth = std::min(a.depth(), b.depth());
  long double acc = 0;
  for (std::size_t i = 0; i <= m.depth; ++i)
    acc += std::ldexp(std::min(1.0, sys.distance(a.at(i), b.at(i))), -static_cast<int>(i));
  m.value = static_cast<double>(acc);
  m.truncation_bound = std::ldexp(1.0, -static_cast<int>(m.depth));
  return m;
}

struct TGammaVerdict {
  bool pass = false;
  std::optional<std::size_t> witness;  // m
  std::vector<std::pair<std::size_t, std::size_t>> failures;  // (m, r) for every m tried
  std::size_t r_max = 0;  // certified only for windows up to this length
};

/// For each branch look for a shift m in [0, t) such that every backward
/// window (x_{-m-r}, ..., x_{-m-1}) with r = 1..r_max has mean log co-norm
/// >= gamma. Windows longer than r_max are not examined.
template <MapSystem S>
std::vector<TGammaVerdict> check_t_gamma_set(const S& sys,
                                             const std::vector<BackwardBranch<typename S::point_type>>& branches,
                                             std::size_t t, double gamma, std::size_t r_max) {
  if (t < 1 || r_max < 1) throw BadParameters("t and r_max must be >= 1");
  std::vector<TGammaVerdict> out;
  out.reserve(branches.size());
  for (const auto& b : branches) {
    if (b.depth() < t + r_max)
      throw DepthTooSmall("branch depth " + std::to_string(b.depth()) + " < t + r_max = " +
                          std::to_string(t + r_max));
    std::vector<double> a(t - 1 + r_max);  // a[k] = log co-norm at x_{-k-1}
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = log_conorm_at(sys, b.at(k + 1));
    TGammaVerdict v;
    v.r_max = r_max;
    for (std::size_t m = 0; m < t && !v.pass; ++m) {
      long double sum = 0;
      bool ok = true;
      for (std::size_t r = 1; r <= r_max; ++r) {
        sum += a[m + r - 1];
        if (sum - static_cast<long double>(gamma) * r < -kStringTol) {
          v.failures.emplace_back(m, r);
          ok = false;
        }
      }
      if (ok) {
        v.pass = true;
        v.witness = m;
        v.failures.clear();
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace siftshadow
