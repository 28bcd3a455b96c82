#pragma once

// Calculus on finite real strings (a_0, ..., a_{m-1}): gamma-strings,
// quasi-expanding strings, Pliss sifting, obstructions and well-adapted
// rescalings. Comparisons are closed ("mean >= gamma") with an absolute
// slack of `kStringTol` on the partial sums.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "siftshadow/errors.hpp"

namespace siftshadow {

inline constexpr double kStringTol = 1e-12;

class RealString {
 public:
  RealString(std::vector<double> values, double bound) : values_(std::move(values)), bound_(bound) {
    if (!(bound_ > 0.0)) throw BadParameters("string bound H must be positive");
    for (double a : values_) {
      if (!std::isfinite(a) || std::abs(a) > bound_ + kStringTol)
        throw BadParameters("string entry " + std::to_string(a) + " exceeds bound H = " +
                            std::to_string(bound_));
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  double bound() const noexcept { return bound_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// S_n = a_0 + ... + a_{n-1}, n = 0..m, in extended precision.
  std::vector<long double> prefix_sums() const {
    std::vector<long double> s(values_.size() + 1, 0.0L);
    for (std::size_t i = 0; i < values_.size(); ++i) s[i + 1] = s[i] + values_[i];
    return s;
  }

  RealString slice(std::size_t begin, std::size_t end) const {
    return RealString({values_.begin() + begin, values_.begin() + end}, bound_);
  }

 private:
  std::vector<double> values_;
  double bound_;
};

/// Pliss constants for H, gamma > gamma_prime: c = (gamma - gamma') / (H - gamma')
/// and N = ceil(1 / c).
struct PlissConstants {
  double c;
  std::size_t n;
};

inline PlissConstants pliss_constants(double bound, double gamma, double gamma_prime) {
  if (!(gamma > gamma_prime)) throw BadParameters("need gamma > gamma_prime");
  if (!(bound > gamma_prime)) throw BadParameters("need H > gamma_prime");
  const double c = std::min(1.0, (gamma - gamma_prime) / (bound - gamma_prime));
  return {c, static_cast<std::size_t>(std::ceil(1.0 / c - 1e-12))};
}

namespace detail {

inline bool mean_at_least(long double sum, std::size_t len, double level) {
  return sum - static_cast<long double>(level) * static_cast<long double>(len) >= -kStringTol;
}

// n in 1..m is a right end of a level-quasi-expanding prefix iff
// G(n) >= max_{j<n} G(j) with G(j) = S_j - level * j.
inline std::vector<std::size_t> quasi_expanding_prefixes(const std::vector<long double>& sums,
                                                         double level) {
  std::vector<std::size_t> out;
  long double best = sums[0];
  for (std::size_t n = 1; n < sums.size(); ++n) {
    const long double g = sums[n] - static_cast<long double>(level) * n;
    if (g - best >= -kStringTol) out.push_back(n);
    best = std::max(best, g);
  }
  return out;
}

}  // namespace detail

/// Mean of the whole string is >= gamma.
inline bool is_gamma_string(const RealString& s, double gamma) {
  if (s.empty()) throw BadParameters("empty string");
  const auto sums = s.prefix_sums();
  return detail::mean_at_least(sums.back(), s.size(), gamma);
}

/// Every average over a right end segment (a_{k-l}, ..., a_{k-1}) is >= lambda.
inline bool is_quasi_expanding(const RealString& s, double lambda) {
  if (s.empty()) throw BadParameters("empty string");
  const auto sums = s.prefix_sums();
  const std::size_t k = s.size();
  const long double end = sums[k] - static_cast<long double>(lambda) * k;
  for (std::size_t j = 0; j < k; ++j) {
    if (end - (sums[j] - static_cast<long double>(lambda) * j) < -kStringTol) return false;
  }
  return true;
}

struct SiftResult {
  std::vector<std::size_t> indices;  // n_1 < ... < n_k, each prefix gamma'-quasi-expanding
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double pliss_constant = 0.0;     // c
  std::size_t pliss_threshold = 0;  // N
};

/// All n whose prefix (a_0, ..., a_{n-1}) is gamma'-quasi-expanding. For a
/// gamma-string of length m >= N there are at least m c of them.
inline SiftResult pliss_sift(const RealString& s, double gamma, double gamma_prime) {
  if (!(gamma_prime > 0.0) || !(gamma_prime < gamma))
    throw BadParameters("pliss_sift needs 0 < gamma_prime < gamma");
  if (!is_gamma_string(s, gamma))
    throw NotGammaString("string mean is below gamma = " + std::to_string(gamma));
  const auto pc = pliss_constants(s.bound(), gamma, gamma_prime);
  SiftResult r;
  r.indices = detail::quasi_expanding_prefixes(s.prefix_sums(), gamma_prime);
  r.gamma = gamma;
  r.gamma_prime = gamma_prime;
  r.pliss_constant = pc.c;
  r.pliss_threshold = pc.n;
  return r;
}

/// Length m >= n and no prefix of length in [n, m] is a rho-string.
inline bool is_obstruction(const RealString& s, std::size_t n, double rho) {
  if (n < 1) throw BadParameters("obstruction order n must be >= 1");
  if (s.size() < n) return false;
  const auto sums = s.prefix_sums();
  for (std::size_t l = n; l <= s.size(); ++l)
    if (detail::mean_at_least(sums[l], l, rho)) return false;
  return true;
}

enum class GapKind { short_gap, obstruction };

inline const char* to_string(GapKind k) { return k == GapKind::short_gap ? "short" : "obstruction"; }

struct GapLabel {
  std::size_t begin;  // n_i
  std::size_t end;    // n_{i+1}
  GapKind kind;
};

/// Labels the gaps between consecutive gamma3-quasi-expanding prefix ends:
/// either n_{i+1} - n_i <= N or (a_{n_i}, ..., a_{n_{i+1}-1}) is an
/// (N, gamma2bar)-obstruction, N = N_{gamma2bar, gamma3}. A gap fitting
/// neither label is a bug and throws std::logic_error.
inline std::vector<GapLabel> classify_gaps(const RealString& s, double gamma2bar, double gamma3) {
  if (!(gamma3 > 0.0 && gamma3 < gamma2bar)) throw BadParameters("need 0 < gamma3 < gamma2bar");
  if (!is_gamma_string(s, gamma2bar)) throw NotGammaString("string mean is below gamma2bar");
  const auto pc = pliss_constants(s.bound(), gamma2bar, gamma3);
  const auto idx = detail::quasi_expanding_prefixes(s.prefix_sums(), gamma3);
  std::vector<GapLabel> out;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const std::size_t a = idx[i], b = idx[i + 1];
    if (b - a <= pc.n) {
      out.push_back({a, b, GapKind::short_gap});
    } else if (is_obstruction(s.slice(a, b), pc.n, gamma2bar)) {
      out.push_back({a, b, GapKind::obstruction});
    } else {
      throw std::logic_error("gap [" + std::to_string(a) + ", " + std::to_string(b) +
                             ") is neither short nor an obstruction");
    }
  }
  return out;
}

struct BadStringGammas {
  double g0, g1, g2, g3;
};

/// Given a gamma0-string whose prefix of length ell is an (n, gamma2)
/// obstruction, returns the smallest k in [ell, m) such that the prefix of
/// length k is gamma3-quasi-expanding but not a gamma1-string. Hypotheses
/// (a) m >= N_{g0,g3}, (b) m c_{g0,g3} > ell, (c) ell >= N_{g1,g2} and
/// (d) ell c_{g1,g2} > n are checked and reported through HypothesesNotMet.
inline std::optional<std::size_t> extract_bad_quasi_string(const RealString& s,
                                                           const BadStringGammas& g,
                                                           std::size_t n, std::size_t ell) {
  if (!(g.g0 > g.g1 && g.g1 > g.g2 && g.g2 > g.g3 && g.g3 > 0.0))
    throw HypothesesNotMet("gammas", "need g0 > g1 > g2 > g3 > 0");
  const std::size_t m = s.size();
  if (!(m > ell && ell > n && n > 0)) throw HypothesesNotMet("lengths", "need m > ell > n > 0");
  if (!is_gamma_string(s, g.g0)) throw HypothesesNotMet("gamma0-string", "string mean below g0");
  if (!is_obstruction(s.slice(0, ell), n, g.g2))
    throw HypothesesNotMet("obstruction", "prefix of length ell is not an (n, g2)-obstruction");
  const auto p03 = pliss_constants(s.bound(), g.g0, g.g3);
  const auto p12 = pliss_constants(s.bound(), g.g1, g.g2);
  if (!(m >= p03.n)) throw HypothesesNotMet("a", "m < N_{g0,g3} = " + std::to_string(p03.n));
  if (!(static_cast<double>(m) * p03.c > static_cast<double>(ell)))
    throw HypothesesNotMet("b", "m c_{g0,g3} <= ell");
  if (!(ell >= p12.n)) throw HypothesesNotMet("c", "ell < N_{g1,g2} = " + std::to_string(p12.n));
  if (!(static_cast<double>(ell) * p12.c > static_cast<double>(n)))
    throw HypothesesNotMet("d", "ell c_{g1,g2} <= n");

  const auto sums = s.prefix_sums();
  for (std::size_t k : detail::quasi_expanding_prefixes(sums, g.g3)) {
    if (k < ell || k >= m) continue;
    if (!detail::mean_at_least(sums[k], k, g.g1)) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// positive strings and well-adapted rescaling

/// (b_0, ..., b_{l-1}) with b_i > 0.
struct PositiveString {
  std::vector<double> values;
  double gamma = 0.5;  // in (0, 1)
};

/// prod_{i=1..k} b_{l-i} >= gamma^{-k} for all k = 1..l.
inline bool is_quasi_expanding(const PositiveString& b) {
  if (b.values.empty()) throw BadParameters("empty string");
  if (!(b.gamma > 0.0 && b.gamma < 1.0)) throw BadParameters("gamma must lie in (0, 1)");
  const double kappa = -std::log(b.gamma);
  long double suffix = 0;
  for (std::size_t k = 1; k <= b.values.size(); ++k) {
    const double v = b.values[b.values.size() - k];
    if (!(v > 0.0)) throw BadParameters("positive strings need b_i > 0");
    suffix += std::log(v) - kappa;
    if (suffix < -kStringTol) return false;
  }
  return true;
}

/// A string c with prod c = 1, every proper prefix product <= 1,
/// b_i / c_i >= gamma^{-1} and min(gamma b_i, 1) <= c_i <= b_i.
///
/// In logs, with u_i = log b_i + log gamma and U_k its prefix sums, take the
/// prefix sums of log c to be U_k - max(0, U_0, ..., U_k).
inline PositiveString well_adapted(const PositiveString& b) {
  if (b.values.size() < 2) throw BadParameters("well_adapted needs length >= 2");
  if (!is_quasi_expanding(b)) throw NotQuasiExpanding("string is not gamma-quasi-expanding");
  const double log_gamma = std::log(b.gamma);
  PositiveString c{std::vector<double>(b.values.size()), b.gamma};
  long double u_sum = 0, run_max = 0, prev_max = 0;
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    const long double u = std::log(b.values[i]) + log_gamma;
    u_sum += u;
    run_max = std::max(run_max, u_sum);
    const long double x = u - (run_max - prev_max);
    prev_max = run_max;
    c.values[i] = static_cast<double>(std::exp(x));
  }
  // the running max ends at U_{l-1} up to rounding; force the exact product
  long double total = 0;
  for (double v : c.values) total += std::log(static_cast<long double>(v));
  if (std::abs(static_cast<double>(total)) > 0.0) {
    // push the residual into the last factor, which only tightens the prefix bounds
    c.values.back() = static_cast<double>(c.values.back() * std::exp(-total));
  }
  return c;
}

/// Rechecks the four defining properties of a well-adapted string in
/// log space; returns an empty string when all hold, else the first failure.
inline std::string check_well_adapted(const PositiveString& b, const PositiveString& c,
                                      double tol = 1e-10) {
  if (b.values.size() != c.values.size()) return "length mismatch";
  const double log_gamma = std::log(b.gamma);
  long double p = 0;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double lb = std::log(b.values[i]);
    const double lc = std::log(c.values[i]);
    p += lc;
    if (i + 1 < c.values.size() && p > tol) return "prefix product exceeds 1 at " + std::to_string(i);
    if (lb - lc < -log_gamma - tol) return "b/c below gamma^{-1} at " + std::to_string(i);
    if (lc < std::min(log_gamma + lb, 0.0) - tol) return "c below min(gamma b, 1) at " + std::to_string(i);
    if (lc > lb + tol) return "c above b at " + std::to_string(i);
  }
  if (std::abs(static_cast<double>(p)) > tol) return "total product differs from 1";
  return {};
}

}  // namespace siftshadow
