#pragma once

// Local diffeomorphisms of the circle R/Z, described by a lift F: R -> R with
// F(x + 1) = F(x) + degree. Points are doubles in [0, 1).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "siftshadow/errors.hpp"
#include "siftshadow/random.hpp"

namespace siftshadow {

inline double frac(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Representative of x mod 1 in [-1/2, 1/2).
inline double wrap(double x) { return x - std::floor(x + 0.5); }

inline double circle_distance(double x, double y) {
  const double t = std::abs(x - y);
  const double u = t - std::floor(t);
  return std::min(u, 1.0 - u);
}

/// Name and numeric parameters, e.g. {"perturbed_doubling", {0.05}}.
struct MapDescriptor {
  std::string name;
  std::vector<double> params;

  std::string to_string() const {
    if (params.empty()) return name;
    std::ostringstream os;
    os.precision(17);
    os << name << '(';
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
    os << ')';
    return os.str();
  }
};

class CircleMap {
 public:
  using point_type = double;
  using linear_map = double;
  using Lift = std::function<double(double)>;
  using Inverse = std::function<std::vector<double>(double)>;

  CircleMap(MapDescriptor desc, int degree, Lift lift, Lift derivative, double lipschitz_bound,
            Inverse inverse = {})
      : desc_(std::move(desc)),
        degree_(degree),
        lift_(std::move(lift)),
        deriv_(std::move(derivative)),
        k_(lipschitz_bound),
        inverse_(std::move(inverse)) {
    if (degree_ < 1) throw BadParameters("circle maps must have positive degree");
    if (!(k_ >= 1.0)) throw BadParameters("Lipschitz bound K must be >= 1");
  }

  const MapDescriptor& descriptor() const noexcept { return desc_; }
  int degree() const noexcept { return degree_; }
  double lipschitz_bound() const noexcept { return k_; }

  double lift(double x) const { return lift_(x); }
  double step(double x) const { return frac(lift_(x)); }
  /// Derivative at x; periodic in x.
  double derivative(double x) const { return deriv_(frac(x)); }
  double distance(double x, double y) const { return circle_distance(x, y); }

  /// All y in [0, 1) with f(y) = x, in increasing order.
  std::vector<double> inverse_branches(double x) const {
    if (inverse_) return inverse_(frac(x));
    return solve_preimages(frac(x));
  }

  /// Preimage number `branch` (0-based, increasing order) of x.
  double inverse_branch(double x, int branch) const { return inverse_branches(x).at(branch); }

 private:
  std::vector<double> solve_preimages(double x) const {
    // lift is increasing; the preimages solve F(y) = x + k for the degree
    // many k with x + k in [F(0), F(0) + degree)
    const double f0 = lift_(0.0);
    const double k0 = std::ceil(f0 - x);
    std::vector<double> out;
    out.reserve(degree_);
    for (int i = 0; i < degree_; ++i) {
      const double target = x + k0 + i;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (lift_(mid) < target)
          lo = mid;
        else
          hi = mid;
      }
      double y = 0.5 * (lo + hi);
      if (std::abs(lift_(lo) - target) <= std::abs(lift_(y) - target)) y = lo;
      out.push_back(frac(y));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  MapDescriptor desc_;
  int degree_;
  Lift lift_;
  Lift deriv_;
  double k_;
  Inverse inverse_;
};

// ---------------------------------------------------------------------------
// map zoo

inline CircleMap identity_map() {
  return CircleMap({"identity", {}}, 1, [](double x) { return x; }, [](double) { return 1.0; }, 1.0,
                   [](double x) { return std::vector<double>{x}; });
}

inline CircleMap doubling_map() {
  return CircleMap({"doubling", {}}, 2, [](double x) { return 2.0 * x; },
                   [](double) { return 2.0; }, 2.0, [](double x) {
                     return std::vector<double>{0.5 * x, 0.5 * (x + 1.0)};
                   });
}

/// x -> 2x + eps sin(2 pi x) / (2 pi) mod 1, a local diffeomorphism for |eps| < 2.
inline CircleMap perturbed_doubling_map(double eps) {
  if (!(std::abs(eps) < 2.0)) throw BadParameters("perturbed_doubling needs |eps| < 2");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double k = std::max(2.0 + std::abs(eps), 1.0 / (2.0 - std::abs(eps)));
  return CircleMap(
      {"perturbed_doubling", {eps}}, 2,
      [eps](double x) { return 2.0 * x + eps * std::sin(two_pi * x) / two_pi; },
      [eps](double x) { return 2.0 + eps * std::cos(two_pi * x); }, k);
}

/// Manneville-Pomeau type degree-2 map with a neutral fixed point at 0:
/// x (1 + (2x)^alpha) on [0, 1/2), 2x - 1 on [1/2, 1).
inline CircleMap neutral_fixed_map(double alpha) {
  if (!(alpha > 0.0)) throw BadParameters("neutral_fixed needs alpha > 0");
  auto lift = [alpha](double x) {
    const double fl = std::floor(x);
    const double u = x - fl;
    const double v = u < 0.5 ? u * (1.0 + std::pow(2.0 * u, alpha)) : 2.0 * u;
    return v + 2.0 * fl;
  };
  auto deriv = [alpha](double u) {
    return u < 0.5 ? 1.0 + (1.0 + alpha) * std::pow(2.0 * u, alpha) : 2.0;
  };
  return CircleMap({"neutral_fixed", {alpha}}, 2, lift, deriv, 2.0 + alpha);
}

/// Increasing piecewise-linear circle map with slope s1 on [0, a) and s2 on
/// [a, 1). The degree is the smallest integer strictly between the slopes
/// (or the common slope when they agree) and a = (degree - s2) / (s1 - s2).
inline CircleMap pl_tent_map(double s1, double s2) {
  if (!(s1 > 0.0 && s2 > 0.0)) throw BadParameters("pl_tent slopes must be positive");
  int degree;
  double a;
  if (s1 == s2) {
    if (s1 != std::round(s1)) throw BadParameters("pl_tent with equal slopes needs an integer slope");
    degree = static_cast<int>(s1);
    a = 0.5;
  } else {
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    degree = static_cast<int>(std::floor(lo)) + 1;
    if (!(degree < hi)) throw BadParameters("pl_tent slopes admit no integer degree between them");
    a = (degree - s2) / (s1 - s2);
  }
  const double fa = s1 * a;
  auto lift = [s1, s2, a, fa, degree](double x) {
    const double fl = std::floor(x);
    const double u = x - fl;
    const double v = u < a ? s1 * u : fa + s2 * (u - a);
    return v + degree * fl;
  };
  auto deriv = [s1, s2, a](double u) { return u < a ? s1 : s2; };
  auto inverse = [s1, s2, a, fa, degree](double x) {
    std::vector<double> out;
    out.reserve(degree);
    for (int k = 0; k < degree; ++k) {
      const double t = x + k;
      const double y = t < fa ? t / s1 : a + (t - fa) / s2;
      out.push_back(frac(y));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const double k = std::max({s1, s2, 1.0 / s1, 1.0 / s2});
  return CircleMap({"pl_tent", {s1, s2}}, degree, lift, deriv, k, inverse);
}

/// f^kappa as a circle map of degree degree^kappa.
inline CircleMap power_map(const CircleMap& f, int kappa) {
  if (kappa < 1) throw BadParameters("power must be >= 1");
  if (kappa == 1) return f;
  long deg = 1;
  for (int i = 0; i < kappa; ++i) {
    deg *= f.degree();
    if (deg > (1 << 20)) throw BadParameters("degree of the power map is too large");
  }
  MapDescriptor desc{"power", {static_cast<double>(kappa)}};
  desc.name = "power[" + f.descriptor().to_string() + "]";
  auto lift = [f, kappa](double x) {
    for (int i = 0; i < kappa; ++i) x = f.lift(x);
    return x;
  };
  auto deriv = [f, kappa](double x) {
    double d = 1.0;
    for (int i = 0; i < kappa; ++i) {
      d *= f.derivative(x);
      x = f.step(x);
    }
    return d;
  };
  auto inverse = [f, kappa](double x) {
    std::vector<double> level{x};
    for (int i = 0; i < kappa; ++i) {
      std::vector<double> next;
      for (double y : level)
        for (double z : f.inverse_branches(y)) next.push_back(z);
      level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return level;
  };
  return CircleMap(desc, static_cast<int>(deg), lift, deriv,
                   std::pow(f.lipschitz_bound(), kappa), inverse);
}

// ---------------------------------------------------------------------------
// orbits built from inverse branches (backward iteration contracts, so these
// are faithful where forward floating-point iteration is not)

/// Orbit x_0..x_N with x_j = branch symbols[j] of x_{j+1}, x_N = terminal.
inline std::vector<double> itinerary_orbit(const CircleMap& f, const std::vector<int>& symbols,
                                           double terminal = 0.5) {
  std::vector<double> orbit(symbols.size() + 1);
  orbit.back() = frac(terminal);
  for (std::size_t j = symbols.size(); j-- > 0;)
    orbit[j] = f.inverse_branch(orbit[j + 1], symbols[j]);
  return orbit;
}

/// Length horizon + 1 orbit following a uniformly random itinerary.
inline std::vector<double> generic_orbit(const CircleMap& f, std::size_t horizon, Rng& rng) {
  constexpr std::size_t pad = 64;
  std::vector<int> symbols(horizon + pad);
  for (auto& s : symbols) s = static_cast<int>(below(rng, static_cast<std::uint64_t>(f.degree())));
  const double terminal = uniform01(rng);
  auto orbit = itinerary_orbit(f, symbols, terminal);
  orbit.resize(horizon + 1);
  return orbit;
}

/// Periodic orbit (p, f(p), ..., f^{tau-1}(p)) whose itinerary is `word`,
/// found by iterating the composed inverse branches around the cycle.
inline std::vector<double> periodic_orbit_from_itinerary(const CircleMap& f,
                                                         const std::vector<int>& word,
                                                         int max_sweeps = 500) {
  if (word.empty()) throw BadParameters("empty itinerary");
  const std::size_t tau = word.size();
  std::vector<double> orbit(tau + 1, 0.5);
  double prev = -1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    orbit[tau] = orbit[0];
    for (std::size_t j = tau; j-- > 0;) orbit[j] = f.inverse_branch(orbit[j + 1], word[j]);
    if (circle_distance(orbit[0], prev) <= 1e-16) break;
    prev = orbit[0];
  }
  orbit.resize(tau);
  return orbit;
}

}  // namespace siftshadow
