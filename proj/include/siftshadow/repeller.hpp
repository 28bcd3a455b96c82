#pragma once

// Periodic repellers from a long expanding orbit: sift the hyperbolic
// times, pair sifted times whose points nearly return, and close each
// returning segment into a periodic orbit. Also the abnormal-orbit verifier
// and the fit of uniform expansion constants.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siftshadow/circle_map.hpp"
#include "siftshadow/dynamics.hpp"
#include "siftshadow/errors.hpp"
#include "siftshadow/parallel.hpp"
#include "siftshadow/random.hpp"
#include "siftshadow/shadowing.hpp"
#include "siftshadow/strings.hpp"

namespace siftshadow {

// ---------------------------------------------------------------------------
// Hausdorff distance between finite subsets of the circle

namespace detail {

// distance from x to the nearest point of the sorted set s
inline double nearest(const std::vector<double>& s, double x) {
  auto it = std::lower_bound(s.begin(), s.end(), x);
  const double a = it == s.end() ? s.front() : *it;
  const double b = it == s.begin() ? s.back() : *(it - 1);
  return std::min(circle_distance(x, a), circle_distance(x, b));
}

inline double directed_hausdorff(std::span<const double> from, const std::vector<double>& sorted_to) {
  double h = 0.0;
  for (double x : from) h = std::max(h, nearest(sorted_to, x));
  return h;
}

}  // namespace detail

inline double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw BadParameters("Hausdorff distance of an empty set");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return std::max(detail::directed_hausdorff(a, sb), detail::directed_hausdorff(b, sa));
}

// ---------------------------------------------------------------------------
// repeller search

struct SiftGammas {
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double gamma_double_prime = 0.0;

  void validate() const {
    if (!(gamma > gamma_prime && gamma_prime > gamma_double_prime && gamma_double_prime > 0.0))
      throw BadParameters("need gamma > gamma' > gamma'' > 0");
  }
};

struct RepellerOptions {
  int power = 1;                  // run on f^power; 0 picks it from the doubling-scale averages
  std::size_t tau_min = 3;        // shortest accepted return time
  std::size_t tau_max = 0;        // longest accepted return time; 0 means no limit
  double max_offset_ratio = 0.5;  // n' / (n'' - n') bound; <= 0 disables it
  double period_growth = 2.0;     // geometric width of the period bands; 1 gives one band per period
  std::size_t candidates_per_band = 32;
  unsigned threads = 0;  // 0: thread_count()
};

struct RecurrencePair {
  std::size_t n1 = 0;  // n'
  std::size_t n2 = 0;  // n''
  double gap = 0.0;    // d(x_{n'}, x_{n''})
};

struct Repeller {
  ShadowResult result;
  RecurrencePair pair;
  double indicator = 0.0;  // smallest suffix average over the period
  double hausdorff = 0.0;  // to the seed orbit
};

struct RepellerSearchReport {
  double seed_point = 0.0;
  std::size_t horizon = 0;
  SiftGammas gammas;
  int power = 1;
  ShadowingConfig config;
  std::size_t sifted = 0;
  std::size_t candidate_pairs = 0;
  std::vector<RecurrencePair> pairs;  // the pair behind each repeller
  std::vector<Repeller> repellers;    // sorted by period, then point
  std::vector<double> hausdorff_trace;
};

namespace detail {

// Smallest t = 2^l whose doubling-scale average of the orbit increments
// reaches gamma (per iterate); 1 when none does.
inline int auto_power(std::span<const double> increments, double gamma, int max_level = 6) {
  for (int l = 0; l <= max_level; ++l) {
    const std::size_t t = std::size_t{1} << l;
    const std::size_t k = increments.size() / t;
    if (k == 0) break;
    long double acc = 0;
    for (std::size_t j = 0; j < k * t; ++j) acc += increments[j];
    if (static_cast<double>(acc / static_cast<long double>(k * t)) >= gamma) return static_cast<int>(t);
  }
  return 1;
}

}  // namespace detail

/// Runs the search on a seed orbit given by its points x_0..x_H (use
/// generic_orbit for maps whose forward iteration is not faithful in
/// floating point). `cfg` must be planned for f^power with lambda = gamma'
/// (in units of f^power) and epsilon < gamma' - gamma''. Periods count
/// iterates of f^power.
inline RepellerSearchReport find_repellers(const CircleMap& f, std::span<const double> orbit,
                                           const SiftGammas& gammas, const ShadowingConfig& cfg,
                                           std::size_t max_repellers,
                                           const RepellerOptions& opt = {}) {
  gammas.validate();
  cfg.validate();
  if (orbit.size() < 2) throw BadParameters("seed orbit is too short");
  if (opt.power < 0) throw BadParameters("power must be >= 0");
  if (!(opt.period_growth >= 1.0)) throw BadParameters("period_growth must be >= 1");
  if (opt.tau_min < 1) throw BadParameters("tau_min must be >= 1");
  if (opt.tau_max > 0 && opt.tau_max < opt.tau_min) throw BadParameters("tau_max must be >= tau_min");

  RepellerSearchReport rep;
  rep.seed_point = orbit.front();
  rep.gammas = gammas;

  int kappa = opt.power;
  if (kappa == 0) {
    const auto s1 = orbit_string_from_points(f, orbit);
    kappa = detail::auto_power(s1.increments, gammas.gamma);
  }
  rep.power = kappa;
  const CircleMap g = power_map(f, kappa);
  std::vector<double> pts;
  for (std::size_t i = 0; i < orbit.size(); i += static_cast<std::size_t>(kappa)) pts.push_back(orbit[i]);
  if (pts.size() < 2) throw BadParameters("seed orbit is too short for this power");
  rep.horizon = pts.size() - 1;
  const double k = static_cast<double>(kappa);
  const double lam = gammas.gamma_prime * k;
  if (std::abs(cfg.lambda - lam) > 1e-12 * std::max(1.0, lam))
    throw BadParameters("cfg.lambda must equal gamma' (times the power)");
  if (!(cfg.epsilon < (gammas.gamma_prime - gammas.gamma_double_prime) * k))
    throw BadParameters("need epsilon < gamma' - gamma''");
  rep.config = cfg;

  // orbit string and its hyperbolic times
  const auto str = orbit_string_from_points(g, std::span<const double>(pts));
  double hmax = std::log(g.lipschitz_bound());
  for (double a : str.increments) hmax = std::max(hmax, std::abs(a));
  const RealString rs(str.increments, hmax * (1.0 + 1e-12) + 1e-300);
  SiftResult sift;
  try {
    sift = pliss_sift(rs, gammas.gamma * k, gammas.gamma_prime * k);
  } catch (const NotGammaString& e) {
    throw NoHyperbolicTimes(std::string("seed orbit is not a gamma-string: ") + e.what());
  }
  if (sift.indices.empty()) throw NoHyperbolicTimes("pliss sift is empty");
  rep.sifted = sift.indices.size();

  // recurrence pairs among sifted times, found through the sifted
  // points sorted by position on the circle
  std::vector<std::pair<double, std::size_t>> by_pos;
  by_pos.reserve(sift.indices.size());
  for (std::size_t n : sift.indices) by_pos.emplace_back(pts[n], n);
  std::sort(by_pos.begin(), by_pos.end());
  const std::size_t m = by_pos.size();
  std::vector<RecurrencePair> candidates;
  auto accept = [&](std::size_t n1, std::size_t n2, double gap) {
    if (n1 >= n2 || n2 - n1 < opt.tau_min || !(gap < cfg.delta)) return;
    if (opt.tau_max > 0 && n2 - n1 > opt.tau_max) return;
    if (opt.max_offset_ratio > 0.0 &&
        static_cast<double>(n1) > opt.max_offset_ratio * static_cast<double>(n2 - n1))
      return;
    candidates.push_back({n1, n2, gap});
  };
  for (std::size_t i = 0; i < m; ++i) {
    const auto [x, n2] = by_pos[i];
    // walk right and left around the circle while within delta
    for (std::size_t step = 1; step < m; ++step) {
      const auto& q = by_pos[(i + step) % m];
      const double d = circle_distance(x, q.first);
      if (!(d < cfg.delta)) break;
      accept(q.second, n2, d);
    }
    for (std::size_t step = 1; step < m; ++step) {
      const auto& q = by_pos[(i + m - step) % m];
      const double d = circle_distance(x, q.first);
      if (!(d < cfg.delta)) break;
      accept(q.second, n2, d);
    }
  }
  rep.candidate_pairs = candidates.size();
  if (candidates.empty())
    throw NoRecurrence("no sifted return within delta = " + std::to_string(cfg.delta) +
                       "; try a longer horizon");

  // group into period bands [tau_min growth^b, tau_min growth^{b+1})
  auto band_of = [&](std::size_t tau) -> std::size_t {
    if (opt.period_growth == 1.0) return tau;
    return static_cast<std::size_t>(std::floor(
        std::log(static_cast<double>(tau) / static_cast<double>(opt.tau_min)) / std::log(opt.period_growth) +
        1e-12));
  };
  std::sort(candidates.begin(), candidates.end(), [&](const RecurrencePair& a, const RecurrencePair& b) {
    const auto ba = band_of(a.n2 - a.n1), bb = band_of(b.n2 - b.n1);
    if (ba != bb) return ba < bb;
    if (a.gap != b.gap) return a.gap < b.gap;
    if (a.n2 != b.n2) return a.n2 < b.n2;
    return a.n1 < b.n1;
  });
  std::vector<std::pair<std::size_t, std::size_t>> bands;  // [begin, end) in candidates
  for (std::size_t i = 0; i < candidates.size();) {
    std::size_t j = i;
    const auto b = band_of(candidates[i].n2 - candidates[i].n1);
    while (j < candidates.size() && band_of(candidates[j].n2 - candidates[j].n1) == b) ++j;
    bands.emplace_back(i, j);
    i = j;
  }

  std::vector<double> seed_sorted(pts.begin(), pts.end());
  std::sort(seed_sorted.begin(), seed_sorted.end());
  auto seed_hausdorff = [&](std::span<const double> set) {
    std::vector<double> s(set.begin(), set.end());
    std::sort(s.begin(), s.end());
    return std::max(detail::directed_hausdorff(set, seed_sorted),
                    detail::directed_hausdorff(std::span<const double>(pts), s));
  };

  // per band, rank the smallest-gap candidates by how well their
  // segment covers the seed orbit and close the best one that closes
  std::vector<std::optional<Repeller>> found(bands.size());
  parallel_for(
      bands.size(),
      [&](std::size_t b) {
        const auto [lo, hi] = bands[b];
        const std::size_t take = std::min(hi - lo, opt.candidates_per_band);
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t c = lo; c < lo + take; ++c) {
          const auto& p = candidates[c];
          ranked.emplace_back(seed_hausdorff(std::span<const double>(pts).subspan(p.n1, p.n2 - p.n1)), c);
        }
        std::sort(ranked.begin(), ranked.end());
        for (const auto& [h, c] : ranked) {
          const auto& p = candidates[c];
          const std::vector<std::size_t> len{p.n2 - p.n1};
          std::vector<double> seg(pts.begin() + static_cast<std::ptrdiff_t>(p.n1),
                                  pts.begin() + static_cast<std::ptrdiff_t>(p.n2));
          try {
            const auto chain = chain_from_segments(g, seg, len, true);
            Repeller r;
            r.result = close_periodic(g, chain, cfg);
            r.pair = p;
            r.indicator = r.result.suffix_min_average;
            r.hausdorff = seed_hausdorff(r.result.orbit);
            found[b] = std::move(r);
            return;
          } catch (const Error&) {
            // try the next candidate in this band
          }
        }
      },
      opt.threads ? opt.threads : thread_count());

  for (auto& r : found)
    if (r) rep.repellers.push_back(std::move(*r));
  std::sort(rep.repellers.begin(), rep.repellers.end(), [](const Repeller& a, const Repeller& b) {
    if (*a.result.period != *b.result.period) return *a.result.period < *b.result.period;
    return a.result.point < b.result.point;
  });
  if (rep.repellers.size() > max_repellers) rep.repellers.resize(max_repellers);
  for (const auto& r : rep.repellers) {
    rep.pairs.push_back(r.pair);
    rep.hausdorff_trace.push_back(r.hausdorff);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// abnormal inequality

struct AbnormalVerdict {
  bool mean_below = false;      // (1/tau) sum log conorm < gamma''
  bool suffixes_above = false;  // every suffix average > gamma'
  double mean = 0.0;
  double min_suffix = 0.0;
  bool abnormal() const { return mean_below && suffixes_above; }
};

/// Checks the abnormal inequalities on a periodic orbit given by its points.
inline AbnormalVerdict verify_abnormal_orbit(const CircleMap& f, std::span<const double> orbit,
                                             double gamma_prime, double gamma_double_prime,
                                             const Tolerances& tol = {}) {
  if (!(0.0 < gamma_prime && gamma_prime < gamma_double_prime))
    throw BadParameters("need 0 < gamma' < gamma''");
  if (orbit.empty()) throw BadParameters("empty orbit");
  const double defect = cyclic_defect(f, orbit);
  if (!(defect <= tol.per)) throw NotPeriodic(orbit.front(), static_cast<int>(orbit.size()), defect);
  const auto suf = suffix_averages(f, orbit);
  AbnormalVerdict v;
  v.mean = suf.back();
  v.min_suffix = *std::min_element(suf.begin(), suf.end());
  v.mean_below = v.mean < gamma_double_prime;
  v.suffixes_above = v.min_suffix > gamma_prime;
  return v;
}

/// Point form: p must return to itself after tau forward steps.
inline AbnormalVerdict verify_abnormal(const CircleMap& f, double p, int tau, double gamma_prime,
                                       double gamma_double_prime, const Tolerances& tol = {}) {
  if (tau < 1) throw BadParameters("period must be >= 1");
  std::vector<double> orbit{p};
  for (int i = 1; i < tau; ++i) orbit.push_back(f.step(orbit.back()));
  const double defect = circle_distance(f.step(orbit.back()), p);
  if (!(defect <= tol.per)) throw NotPeriodic(p, tau, defect);
  return verify_abnormal_orbit(f, orbit, gamma_prime, gamma_double_prime, tol);
}

struct AbnormalHit {
  std::vector<int> itinerary;
  std::vector<double> orbit;
  AbnormalVerdict verdict;
};

/// Random-restart search for abnormal periodic orbits: draws `trials`
/// random itineraries with period in [tau_lo, tau_hi], solves for the
/// periodic orbit and keeps those passing both inequalities. No
/// completeness claim.
inline std::vector<AbnormalHit> search_abnormal(const CircleMap& f, double gamma_prime,
                                                double gamma_double_prime, int tau_lo, int tau_hi,
                                                std::size_t trials, std::size_t max_hits, Rng& rng) {
  if (tau_lo < 1 || tau_hi < tau_lo) throw BadParameters("bad period range");
  std::vector<AbnormalHit> hits;
  for (std::size_t t = 0; t < trials && hits.size() < max_hits; ++t) {
    const int tau = tau_lo + static_cast<int>(below(rng, static_cast<std::uint64_t>(tau_hi - tau_lo + 1)));
    std::vector<int> word(static_cast<std::size_t>(tau));
    for (auto& s : word) s = static_cast<int>(below(rng, static_cast<std::uint64_t>(f.degree())));
    auto orbit = periodic_orbit_from_itinerary(f, word);
    try {
      auto v = verify_abnormal_orbit(f, orbit, gamma_prime, gamma_double_prime);
      if (v.abnormal()) hits.push_back({std::move(word), std::move(orbit), v});
    } catch (const NotPeriodic&) {
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// uniform expansion constants

struct ExpansionFit {
  double C = 1.0;
  double lambda = 0.0;
  bool expanding = false;  // lambda > 0
  std::string diagnostic;
  std::size_t grid_size = 1000;
  std::size_t k_max = 0;
  std::size_t points = 0;
};

/// Largest lambda on a grid of 1000 points in [0, log K] such that
/// log|D_x f^k|_co >= log C + k lambda holds at every sample with C >= c_floor,
/// where C(lambda) = exp(min_{x,k} (log|D_x f^k|_co - k lambda)) is the best
/// constant. When even lambda = 0 fails, lambda is the smallest sampled
/// (1/k) log|D_x f^k|_co and C = 1.
template <MapSystem S>
ExpansionFit estimate_expansion_constants(const S& sys, std::span<const typename S::point_type> points,
                                          std::size_t k_max, double c_floor = 1.0) {
  if (points.empty()) throw BadParameters("no points supplied");
  if (k_max < 1) throw BadParameters("k_max must be >= 1");
  std::vector<std::vector<double>> prof;
  prof.reserve(points.size());
  for (const auto& x : points) prof.push_back(log_conorm_profile(sys, x, k_max));
  auto best_logc = [&](double lam) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& p : prof)
      for (std::size_t k = 1; k <= k_max; ++k) lo = std::min(lo, p[k - 1] - static_cast<double>(k) * lam);
    return lo;
  };
  ExpansionFit fit;
  fit.k_max = k_max;
  fit.points = points.size();
  const double log_k = std::log(sys.lipschitz_bound());
  const double log_floor = std::log(c_floor);
  // feasibility is monotone in lambda, so scan down from the top
  for (std::size_t i = fit.grid_size; i-- > 0;) {
    const double lam = i + 1 == fit.grid_size ? log_k : log_k * static_cast<double>(i) / (fit.grid_size - 1);
    const double lc = best_logc(lam);
    if (lc >= log_floor - 1e-12) {
      fit.lambda = lam;
      fit.C = std::exp(lc);
      break;
    }
    if (i == 0) {
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& p : prof)
        for (std::size_t k = 1; k <= k_max; ++k) worst = std::min(worst, p[k - 1] / static_cast<double>(k));
      fit.lambda = worst;
      fit.C = 1.0;
    }
  }
  fit.expanding = fit.lambda > 0.0;
  if (!fit.expanding) fit.diagnostic = "no positive-lambda fit: sample is not uniformly expanding";
  return fit;
}

}  // namespace siftshadow
