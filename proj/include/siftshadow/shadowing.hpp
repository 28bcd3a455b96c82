#pragma once

// Shadowing and closing of quasi-expanding pseudo-orbits of circle maps.
//
// A pseudo-orbit y_0, y_1, ... is corrected to a true orbit z_j = y_j + v_j
// by solving v_{j+1} = Phi_j(v_j), where Phi_j(v) = F(y_j + v) - y_{j+1}
// (mod 1) is the map read in the arc-length chart at (y_j, y_{j+1}). Within
// each orbit string the Phi_j are rescaled by a well-adapted string so they
// become uniformly expanding, and the backward graph transform
// v_j <- Phi_j^{-1}(v_{j+1}) is then a contraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siftshadow/circle_map.hpp"
#include "siftshadow/dynamics.hpp"
#include "siftshadow/errors.hpp"
#include "siftshadow/strings.hpp"

namespace siftshadow {

struct ShadowingConfig {
  double lambda = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  double eps_contraction = 0.0;
  double eps1 = 0.0;
  double sigma = 0.0;
  double r = 0.0;
  double delta = 0.0;
  double lipschitz_bound = 1.0;  // K of the map the constants were planned for

  double tol_fix = 1e-12;
  std::size_t max_iter = 100000;
  std::size_t lip_samples = 1000;
  double tol_per = 1e-9;

  /// Rechecks the constant chain; throws BadParameters naming the first failure.
  void validate() const {
    auto fail = [](const std::string& what) { throw BadParameters("shadowing config: " + what); };
    if (!(lambda > 0.0)) fail("lambda must be positive");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (!(tau > 0.0 && tau < 1.0)) fail("tau must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0, 1)");
    if (!((1.0 - tau) * std::exp(lambda) * gamma >= 1.0 - 1e-12))
      fail("need (1 - tau) e^lambda >= 1 / gamma");
    if (!(eps_contraction > 0.0)) fail("eps_contraction must be positive");
    const double e1 = 2.0 * eps_contraction * (1.0 + gamma) / (1.0 - gamma);
    if (!(e1 < 1.0)) fail("need eps1 = 2 eps (1 + gamma) / (1 - gamma) < 1");
    if (std::abs(e1 - eps1) > 1e-12) fail("eps1 is inconsistent with eps_contraction");
    const double s = (1.0 - gamma) * (1.0 - eps1) / (2.0 * (1.0 + gamma));
    if (!(sigma > 0.0 && sigma <= s * (1.0 + 1e-12))) fail("sigma exceeds (1-gamma)(1-eps1)/(2(1+gamma))");
    if (!(r > 0.0 && r <= epsilon)) fail("r must lie in (0, epsilon]");
    if (!(delta > 0.0 && delta <= r * sigma * (1.0 + 1e-12))) fail("delta must lie in (0, r sigma]");
    if (!(lipschitz_bound >= 1.0)) fail("K must be >= 1");
    if (!(tol_fix > 0.0) || max_iter < 1) fail("bad iteration controls");
  }

  /// Bound on the Lipschitz constant of the unscaled remainders; rescaling
  /// inflates it by at most K / gamma, which keeps it below sigma.
  double remainder_lip_target() const { return sigma / (lipschitz_bound * std::exp(lambda)); }
};

namespace detail {

// Deterministic low-discrepancy points in [0, 1): additive recurrences with
// the golden ratio and sqrt(2).
inline double lds(std::size_t i, int axis) {
  constexpr double a0 = 0.6180339887498949;
  constexpr double a1 = 0.4142135623730951;
  return frac(0.5 + static_cast<double>(i + 1) * (axis == 0 ? a0 : a1));
}

// max |f'(x + u) - f'(x)| over sampled x on the circle and |u| <= r
inline double derivative_modulus(const CircleMap& f, double r, std::size_t samples) {
  double w = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = lds(i, 0);
    const double u = r * (2.0 * lds(i, 1) - 1.0);
    w = std::max(w, std::abs(f.derivative(x + u) - f.derivative(x)));
  }
  return w;
}

}  // namespace detail

/// Chooses every constant from (lambda, epsilon): tau, gamma from lambda,
/// eps1 = 1/2, then r by halving from epsilon until the sampled modulus of
/// continuity of f' (with a 2x safety factor) is below
/// sigma / (K e^lambda), and delta = r sigma.
inline ShadowingConfig plan_shadowing(const CircleMap& f, double lambda, double epsilon) {
  if (!(lambda > 0.0)) throw BadParameters("lambda must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw BadParameters("epsilon must lie in (0, 1/2)");
  ShadowingConfig c;
  c.lambda = lambda;
  c.epsilon = epsilon;
  c.tau = 0.5 * (1.0 - std::exp(-0.5 * lambda));
  c.gamma = std::min(1.0 / ((1.0 - c.tau) * std::exp(lambda)), 1.0 - 1e-9);
  c.eps_contraction = (1.0 - c.gamma) / (4.0 * (1.0 + c.gamma));
  c.eps1 = 2.0 * c.eps_contraction * (1.0 + c.gamma) / (1.0 - c.gamma);
  c.sigma = (1.0 - c.gamma) * (1.0 - c.eps1) / (2.0 * (1.0 + c.gamma));
  c.lipschitz_bound = f.lipschitz_bound();
  const double target = c.remainder_lip_target();
  double r = epsilon;
  for (int i = 0; i < 80 && 2.0 * detail::derivative_modulus(f, r, c.lip_samples) > target; ++i)
    r *= 0.5;
  if (2.0 * detail::derivative_modulus(f, r, c.lip_samples) > target)
    throw BadParameters("no admissible radius r: derivative varies too fast");
  c.r = r;
  c.delta = r * c.sigma;
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// lifts

/// Phi(v) = H v + phi(v) near 0, the map read in charts at (x, y).
struct LiftRecord {
  double x = 0.0;
  double y = 0.0;
  double H = 1.0;
  std::function<double(double)> Phi;
  double lip_phi_bound = 0.0;  // sampled, with 2x safety factor

  double phi(double v) const { return Phi(v) - H * v; }
};

/// Lift of f at (x, y): Phi(v) = wrap(F(x + v) - y), H = f'(x).
inline LiftRecord build_lift(const CircleMap& f, double x, double y, const ShadowingConfig& cfg,
                             bool sample_lip = true) {
  const double gap = circle_distance(f.step(x), y);
  if (gap > cfg.r) throw GapTooLarge("gap " + std::to_string(gap) + " exceeds r = " + std::to_string(cfg.r));
  LiftRecord L;
  L.x = x;
  L.y = y;
  L.H = f.derivative(x);
  if (L.H == 0.0 || !std::isfinite(L.H)) throw SingularMatrix();
  // F(x + v) - y is within r + K r of an integer, so wrap() is continuous here
  L.Phi = [&f, x, y](double v) { return wrap(f.lift(x + v) - y); };
  if (sample_lip) {
    double lip = 0.0;
    for (std::size_t i = 0; i < cfg.lip_samples; ++i) {
      const double v1 = cfg.r * (2.0 * detail::lds(i, 0) - 1.0);
      const double v2 = cfg.r * (2.0 * detail::lds(i, 1) - 1.0);
      if (v1 == v2) continue;
      lip = std::max(lip, std::abs(L.phi(v1) - L.phi(v2)) / std::abs(v1 - v2));
    }
    L.lip_phi_bound = 2.0 * lip;
  }
  return L;
}

// ---------------------------------------------------------------------------
// pseudo-orbit chains

struct PseudoOrbitChain {
  std::vector<OrbitString<double>> strings;
  std::vector<double> gaps;  // gaps[i] = d(end of string i, base of string i+1)
  bool cyclic = false;

  std::size_t total_length() const {
    std::size_t n = 0;
    for (const auto& s : strings) n += s.length();
    return n;
  }
  /// The concatenated y_j (the first `length` points of every string), plus
  /// the final end point when the chain is not cyclic.
  std::vector<double> concatenated() const {
    std::vector<double> y;
    y.reserve(total_length() + 1);
    for (const auto& s : strings) y.insert(y.end(), s.points.begin(), s.points.end() - 1);
    if (!cyclic && !strings.empty()) y.push_back(strings.back().end_point());
    return y;
  }
  double max_gap() const {
    double g = 0.0;
    for (double x : gaps) g = std::max(g, x);
    return g;
  }
};

inline PseudoOrbitChain make_chain(const CircleMap& f, std::vector<OrbitString<double>> strings,
                                   bool cyclic) {
  if (strings.empty()) throw BadParameters("empty pseudo-orbit chain");
  PseudoOrbitChain c;
  c.strings = std::move(strings);
  c.cyclic = cyclic;
  const std::size_t n = c.strings.size();
  for (std::size_t i = 0; i + 1 < n + (cyclic ? 1 : 0); ++i) {
    const auto& a = c.strings[i];
    const auto& b = c.strings[(i + 1) % n];
    c.gaps.push_back(f.distance(a.end_point(), b.base()));
  }
  return c;
}

/// Chain of single-step strings through the given points, e.g. a perturbed
/// periodic orbit. Each string is (p_i, f(p_i)).
inline PseudoOrbitChain chain_from_points(const CircleMap& f, std::span<const double> points,
                                          bool cyclic) {
  std::vector<OrbitString<double>> strings;
  strings.reserve(points.size());
  for (double p : points) strings.push_back(orbit_string(f, p, 1));
  return make_chain(f, std::move(strings), cyclic);
}

/// Splits an orbit segment given by its points into a chain whose strings
/// have the given lengths (which must sum to points.size() - 1 for a finite
/// chain, or to points.size() for a cyclic one where the segment closes up).
inline PseudoOrbitChain chain_from_segments(const CircleMap& f, std::span<const double> points,
                                            std::span<const std::size_t> lengths, bool cyclic) {
  std::vector<OrbitString<double>> strings;
  std::size_t at = 0;
  for (std::size_t len : lengths) {
    if (len < 1) throw BadParameters("string lengths must be >= 1");
    if (at + len >= points.size() + (cyclic ? 1 : 0))
      throw BadParameters("string lengths exceed the number of points");
    std::vector<double> pts(len + 1);
    for (std::size_t i = 0; i <= len; ++i) pts[i] = points[(at + i) % points.size()];
    // the end point of each string is the true image of its last point
    pts[len] = f.step(pts[len - 1]);
    strings.push_back(orbit_string_from_points(f, std::span<const double>(pts)));
    at += len;
  }
  if (at != points.size() - (cyclic ? 0 : 1)) throw BadParameters("string lengths do not cover the points");
  return make_chain(f, std::move(strings), cyclic);
}

// ---------------------------------------------------------------------------
// rescaling

/// Phi~_j(w) = Phi_j(g_prev w) / g with H~ = H g_prev / g = H / c_j.
struct RescaledStep {
  const LiftRecord* lift = nullptr;
  double g_prev = 1.0;
  double g = 1.0;

  double H() const { return lift->H * g_prev / g; }
  double Phi(double w) const { return lift->Phi(g_prev * w) / g; }
  double phi(double w) const { return Phi(w) - H() * w; }
  double lip_phi_bound() const { return lift->lip_phi_bound * g_prev / g; }
};

struct RescaledChain {
  std::vector<LiftRecord> lifts;   // one per step j
  std::vector<double> scale;       // c_j
  std::vector<double> g;           // g_j, equal to 1 at every block end
  std::vector<std::size_t> block_end;  // last step index of each block
  bool cyclic = false;

  std::size_t size() const { return lifts.size(); }
  RescaledStep step(std::size_t j) const {
    const std::size_t n = lifts.size();
    const double gp = j == 0 ? (cyclic ? g[n - 1] : 1.0) : g[j - 1];
    return {&lifts[j], gp, g[j]};
  }
};

/// Builds the lifts along the chain and rescales each block by a
/// well-adapted string for its co-norms.
inline RescaledChain compose_and_rescale(const CircleMap& f, const PseudoOrbitChain& chain,
                                         const ShadowingConfig& cfg, bool sample_lip = true) {
  cfg.validate();
  for (std::size_t i = 0; i < chain.gaps.size(); ++i) {
    if (!(chain.gaps[i] < cfg.delta))
      throw GapTooLarge("gap " + std::to_string(i) + " = " + std::to_string(chain.gaps[i]) +
                        " is not below delta = " + std::to_string(cfg.delta));
  }
  const auto y = chain.concatenated();
  const std::size_t n = chain.total_length();
  RescaledChain rc;
  rc.cyclic = chain.cyclic;
  rc.lifts.reserve(n);
  rc.scale.reserve(n);
  rc.g.reserve(n);
  std::size_t j = 0;
  for (const auto& s : chain.strings) {
    double hmax = 0.0;
    for (double a : s.increments) hmax = std::max(hmax, std::abs(a));
    if (!is_quasi_expanding(RealString(s.increments, hmax + 1.0), cfg.lambda))
      throw NotQuasiExpanding("orbit string at " + std::to_string(s.base()) +
                              " is not lambda-quasi-expanding");
    PositiveString b{{}, cfg.gamma};
    for (std::size_t i = 0; i < s.length(); ++i, ++j) {
      const double next = j + 1 < y.size() ? y[j + 1] : y[0];
      rc.lifts.push_back(build_lift(f, y[j], next, cfg, sample_lip));
      b.values.push_back(std::abs(rc.lifts.back().H));
    }
    PositiveString c = b.values.size() == 1 ? PositiveString{{1.0}, cfg.gamma} : well_adapted(b);
    double g = 1.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      g *= c.values[i];
      rc.scale.push_back(c.values[i]);
      rc.g.push_back(g);
    }
    rc.g.back() = 1.0;
    rc.block_end.push_back(j - 1);
  }
  return rc;
}

// ---------------------------------------------------------------------------
// contraction solver

struct SolveReport {
  std::vector<double> w;  // rescaled displacements
  std::vector<double> v;  // chart displacements v_j = g_{j-1} w_j
  std::size_t iterations = 0;
  double residual = 0.0;  // |T(w) - w|_inf
  double norm = 0.0;      // |w|_inf
  double max_lip = 0.0;   // largest sampled Lip of the rescaled remainders
};

namespace detail {

// Solves Phi~(w) = target for w near `start`: Picard iteration on
// w <- (target - phi~(w)) / H~, with bisection on the monotone Phi~ when
// the remainder is not contracting (e.g. at a kink of a PL map).
inline double invert_step(const RescaledStep& s, double target, double start, double bound) {
  const double H = s.H();
  // rounding noise of Phi~ is about one ulp of F, amplified by 1/g
  const double noise = 1e-15 * (1.0 + 1.0 / s.g);
  double w = start;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double next = (target - s.phi(w)) / H;
    if (!std::isfinite(next)) break;
    const double d = std::abs(next - w);
    w = next;
    if (d <= noise || (it >= 2 && d >= last)) break;
    last = d;
  }
  if (std::isfinite(w) && std::abs(s.Phi(w) - target) <= 100.0 * noise) return w;
  // Phi~ is monotone with the sign of H on the chart ball
  const double sign = H > 0 ? 1.0 : -1.0;
  double lo = -bound, hi = bound;
  auto val = [&](double t) { return sign * (s.Phi(t) - target); };
  for (int it = 0; it < 60 && val(lo) > 0; ++it) lo *= 2;
  for (int it = 0; it < 60 && val(hi) < 0; ++it) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (val(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(val(lo)) <= std::abs(val(hi)) ? lo : hi;
}

}  // namespace detail

/// Fixed point of w_j = Phi~_j^{-1}(w_{j+1}), cyclically, or with w_n = 0
/// for a finite chain. Sweeps backward (Gauss-Seidel) until successive
/// iterates differ by less than tol_fix, then asserts the residual and the
/// bound |w| <= delta / sigma.
inline SolveReport solve_contraction(const RescaledChain& rc, const ShadowingConfig& cfg,
                                     std::optional<std::vector<double>> initial = std::nullopt) {
  const std::size_t n = rc.size();
  if (n == 0) throw BadParameters("empty chain");
  const double bound = cfg.delta / cfg.sigma;
  SolveReport rep;
  for (std::size_t j = 0; j < n; ++j) {
    const auto s = rc.step(j);
    if (!(std::abs(s.H()) >= (1.0 - 1e-12) / cfg.gamma))
      throw ContractionFailed("rescaled co-norm at step " + std::to_string(j) + " is below 1/gamma");
    if (!(std::abs(s.phi(0.0)) <= cfg.delta * (1.0 + 1e-9) + 1e-15))
      throw GapTooLarge("rescaled remainder at step " + std::to_string(j) + " exceeds delta");
    rep.max_lip = std::max(rep.max_lip, s.lip_phi_bound());
  }

  std::vector<double> w = initial ? *initial : std::vector<double>(n, 0.0);
  if (w.size() != n) throw BadParameters("initial guess has the wrong length");
  auto target_of = [&](const std::vector<double>& x, std::size_t j) {
    return j + 1 < n ? x[j + 1] : (rc.cyclic ? x[0] : 0.0);
  };

  bool converged = false;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    double diff = 0.0;
    for (std::size_t j = n; j-- > 0;) {
      const double nw = detail::invert_step(rc.step(j), target_of(w, j), w[j], 2.0 * bound + 1e-300);
      diff = std::max(diff, std::abs(nw - w[j]));
      w[j] = nw;
    }
    rep.iterations = it;
    if (diff < cfg.tol_fix) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ContractionFailed("no convergence within " + std::to_string(cfg.max_iter) + " sweeps");

  for (std::size_t j = 0; j < n; ++j) {
    const double tj = detail::invert_step(rc.step(j), target_of(w, j), w[j], 2.0 * bound + 1e-300);
    rep.residual = std::max(rep.residual, std::abs(tj - w[j]));
    rep.norm = std::max(rep.norm, std::abs(w[j]));
  }
  if (!(rep.residual <= 1e-10))
    throw ContractionFailed("fixed point residual " + std::to_string(rep.residual) + " exceeds 1e-10");
  if (!(rep.norm <= bound + 1e-12))
    throw ContractionFailed("fixed point norm " + std::to_string(rep.norm) + " exceeds delta/sigma");

  rep.v.resize(n);
  for (std::size_t j = 0; j < n; ++j) rep.v[j] = rc.step(j).g_prev * w[j];
  rep.w = std::move(w);
  return rep;
}

// ---------------------------------------------------------------------------
// closing and finite shadowing

struct ShadowResult {
  double point = 0.0;
  std::optional<int> period;
  std::vector<double> orbit;  // z_0, ..., z_{n-1} (plus z_n for finite windows)
  double shadow_distance = 0.0;
  std::vector<double> post_averages;  // suffix averages, l = 1..period
  double suffix_min_average = 0.0;
  double defect = 0.0;  // cyclic one-step defect for periodic results
  SolveReport solve;
};

/// (1/l) sum_{j=1..l} log |f'(z_{tau-j})| for l = 1..tau.
inline std::vector<double> suffix_averages(const CircleMap& f, std::span<const double> orbit) {
  std::vector<double> out(orbit.size());
  long double acc = 0;
  for (std::size_t l = 1; l <= orbit.size(); ++l) {
    acc += std::log(conorm(f.derivative(orbit[orbit.size() - l])));
    out[l - 1] = static_cast<double>(acc / static_cast<long double>(l));
  }
  return out;
}

namespace detail {

inline ShadowResult assemble(const std::vector<double>& y, SolveReport&& rep,
                             bool cyclic) {
  ShadowResult res;
  const std::size_t n = rep.v.size();
  res.orbit.resize(cyclic ? n : n + 1);
  for (std::size_t j = 0; j < n; ++j) res.orbit[j] = frac(y[j] + rep.v[j]);
  if (!cyclic) res.orbit[n] = y[n];
  for (std::size_t j = 0; j < res.orbit.size(); ++j)
    res.shadow_distance = std::max(res.shadow_distance, circle_distance(res.orbit[j], y[j]));
  res.point = res.orbit[0];
  res.solve = std::move(rep);
  return res;
}

}  // namespace detail

/// True periodic orbit of period sum n_i epsilon-shadowing a cyclic chain of
/// lambda-quasi-expanding strings with gaps below delta.
inline ShadowResult close_periodic(const CircleMap& f, const PseudoOrbitChain& chain,
                                   const ShadowingConfig& cfg, bool sample_lip = true) {
  if (!chain.cyclic) throw BadParameters("close_periodic needs a cyclic chain");
  const auto rc = compose_and_rescale(f, chain, cfg, sample_lip);
  const auto y = chain.concatenated();
  auto res = detail::assemble(y, solve_contraction(rc, cfg), true);
  res.period = static_cast<int>(y.size());
  res.defect = cyclic_defect(f, std::span<const double>(res.orbit));
  if (!(res.defect <= cfg.tol_per)) throw NotPeriodic(res.point, *res.period, res.defect);
  if (!(res.shadow_distance <= cfg.epsilon))
    throw ContractionFailed("shadow distance exceeds epsilon");
  res.post_averages = suffix_averages(f, res.orbit);
  res.suffix_min_average = *std::min_element(res.post_averages.begin(), res.post_averages.end());
  if (!(res.suffix_min_average >= cfg.lambda - cfg.epsilon - 1e-12))
    throw ContractionFailed("suffix average below lambda - epsilon");
  return res;
}

/// Reruns the solver from `guesses` initial points (spread over the ball of
/// radius delta/sigma) and returns the largest distance between the
/// resulting fixed points and the one from the zero guess.
inline double uniqueness_spread(const CircleMap& f, const PseudoOrbitChain& chain,
                                const ShadowingConfig& cfg, int guesses = 5) {
  const auto rc = compose_and_rescale(f, chain, cfg, false);
  const auto base = solve_contraction(rc, cfg);
  const double bound = cfg.delta / cfg.sigma;
  double spread = 0.0;
  for (int k = 0; k < guesses; ++k) {
    std::vector<double> w0(rc.size());
    for (std::size_t j = 0; j < w0.size(); ++j)
      w0[j] = bound * (2.0 * detail::lds(j * 7 + static_cast<std::size_t>(k) * 101, k % 2) - 1.0);
    const auto other = solve_contraction(rc, cfg, w0);
    for (std::size_t j = 0; j < w0.size(); ++j)
      spread = std::max(spread, std::abs(other.v[j] - base.v[j]));
  }
  return spread;
}

/// True orbit segment z_0..z_N shadowing a finite chain, with z_N = y_N.
inline ShadowResult shadow_finite(const CircleMap& f, const PseudoOrbitChain& chain,
                                  const ShadowingConfig& cfg, bool sample_lip = true) {
  if (chain.cyclic) throw BadParameters("shadow_finite needs a finite chain");
  const auto rc = compose_and_rescale(f, chain, cfg, sample_lip);
  const auto y = chain.concatenated();
  auto res = detail::assemble(y, solve_contraction(rc, cfg), false);
  for (std::size_t j = 0; j + 1 < res.orbit.size(); ++j)
    res.defect = std::max(res.defect, circle_distance(f.step(res.orbit[j]), res.orbit[j + 1]));
  if (!(res.shadow_distance <= cfg.epsilon))
    throw ContractionFailed("shadow distance exceeds epsilon");
  std::vector<double> body(res.orbit.begin(), res.orbit.end() - 1);
  res.post_averages = suffix_averages(f, body);
  res.suffix_min_average = *std::min_element(res.post_averages.begin(), res.post_averages.end());
  return res;
}

}  // namespace siftshadow
