#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "siftshadow/siftshadow.hpp"

using namespace siftshadow;

namespace {

const double kLog2 = std::numbers::ln2;

ShadowingConfig doubling_cfg() { return plan_shadowing(doubling_map(), 0.5, 0.01); }

TEST(Planner, DoublingConstants) {
  const auto c = doubling_cfg();
  const double tau = (1 - std::exp(-0.25)) / 2;
  const double gamma = 1 / ((1 - tau) * std::exp(0.5));
  EXPECT_NEAR(c.tau, tau, 1e-15);
  EXPECT_NEAR(c.gamma, gamma, 1e-15);
  EXPECT_NEAR(c.eps1, 0.5, 1e-15);
  EXPECT_NEAR(c.sigma, (1 - gamma) * 0.5 / (2 * (1 + gamma)), 1e-15);
  EXPECT_EQ(c.r, 0.01);
  EXPECT_NEAR(c.delta, c.r * c.sigma, 1e-18);
  EXPECT_NO_THROW(c.validate());
}

TEST(Planner, RejectsBrokenChain) {
  auto c = doubling_cfg();
  c.delta = 2 * c.r * c.sigma;
  EXPECT_THROW(c.validate(), BadParameters);
  c = doubling_cfg();
  c.gamma = 0.99;
  EXPECT_THROW(c.validate(), BadParameters);
  EXPECT_THROW(plan_shadowing(doubling_map(), -1.0, 0.01), BadParameters);
}

TEST(Planner, SmoothMapShrinksRadius) {
  const auto f = perturbed_doubling_map(0.5);
  const auto c = plan_shadowing(f, 0.5, 0.01);
  EXPECT_LT(c.r, 0.01);
  EXPECT_LE(2 * detail::derivative_modulus(f, c.r, 1000), c.remainder_lip_target());
  EXPECT_GT(2 * detail::derivative_modulus(f, 2 * c.r, 1000), c.remainder_lip_target());
}

TEST(Lift, ExactOrbitHasZeroRemainder) {
  const auto f = perturbed_doubling_map(0.05);
  const auto cfg = plan_shadowing(f, 0.5, 0.01);
  const auto L = build_lift(f, 0.3, f.step(0.3), cfg);
  EXPECT_EQ(L.phi(0.0), 0.0);
}

TEST(Lift, DoublingIsLinearInTheChart) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  const auto L = build_lift(f, 0.3, 0.6, cfg);
  EXPECT_EQ(L.H, 2.0);
  EXPECT_LE(L.lip_phi_bound, 1e-10);  // rounding only
  for (double v : {-0.01, -0.003, 0.0, 0.004, 0.01}) EXPECT_NEAR(L.phi(v), 0.0, 1e-15);
}

TEST(Lift, PerturbedRemainderBounds) {
  const auto f = perturbed_doubling_map(0.05);
  const auto cfg = plan_shadowing(f, 0.5, 0.01);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const double x = uniform01(rng);
    const double y = frac(f.step(x) + (t % 2 ? 0.5 : -0.5) * cfg.delta);
    const auto L = build_lift(f, x, y, cfg);
    EXPECT_LE(std::abs(L.phi(0.0)), cfg.delta);
    EXPECT_LE(L.lip_phi_bound, cfg.remainder_lip_target() * 1.0000001);
    const double ratio = std::abs(L.H) / f.derivative(x);
    EXPECT_GE(ratio, 1 - cfg.tau);
    EXPECT_LE(ratio, 1 + cfg.tau);
  }
}

TEST(Lift, GapTooLarge) {
  const auto cfg = doubling_cfg();
  EXPECT_THROW(build_lift(doubling_map(), 0.3, 0.7, cfg), GapTooLarge);
}

TEST(Rescale, UniformBlocksNeedNoRescaling) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  const std::vector<double> pts{1.0 / 7, 2.0 / 7, 4.0 / 7};
  const std::vector<std::size_t> len{3};
  const auto rc = compose_and_rescale(f, chain_from_segments(f, pts, len, true), cfg);
  for (double c : rc.scale) EXPECT_EQ(c, 1.0);
  for (double g : rc.g) EXPECT_EQ(g, 1.0);
}

TEST(Rescale, SingleStepBlocks) {
  const auto f = doubling_map();
  const std::vector<double> pts{1.0 / 3, 2.0 / 3};
  const auto rc = compose_and_rescale(f, chain_from_points(f, pts, true), doubling_cfg());
  for (double g : rc.g) EXPECT_EQ(g, 1.0);
}

// derivative 1/2 at x = 1/2, which maps to the fixed point 0 with
// derivative 7/2: one contracting step followed by strong expansion
TEST(Rescale, QuasiExpandingBlockPassesPostconditions) {
  const auto f = perturbed_doubling_map(1.5);
  const auto cfg = plan_shadowing(f, 0.3, 0.01);
  const std::vector<double> pts{0.5, 0.0, 0.0, 0.0};
  const std::vector<std::size_t> len{3};
  const auto chain = chain_from_segments(f, pts, len, false);
  ASSERT_LT(chain.strings[0].increments[0], 0.0);
  const auto rc = compose_and_rescale(f, chain, cfg);
  for (std::size_t j = 0; j < rc.size(); ++j) {
    const auto st = rc.step(j);
    EXPECT_GE(std::abs(st.H()), (1 - 1e-12) / cfg.gamma);
    EXPECT_LE(std::abs(st.phi(0.0)), cfg.delta);
  }
  EXPECT_LT(rc.scale[0], 1.0);
  EXPECT_EQ(rc.g.back(), 1.0);
  const auto res = shadow_finite(f, chain, cfg);
  EXPECT_LE(res.shadow_distance, 1e-12);
}

TEST(Solver, LinearCaseGivesZero) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  const std::vector<double> pts{1.0 / 7, 2.0 / 7, 4.0 / 7};
  const auto rc = compose_and_rescale(f, chain_from_points(f, pts, true), cfg);
  const auto rep = solve_contraction(rc, cfg);
  for (double v : rep.v) EXPECT_LE(std::abs(v), 1e-15);
}

TEST(Close, ExactPeriodicOrbitIsReturned) {
  const auto f = doubling_map();
  const std::vector<double> pts{1.0 / 7, 2.0 / 7, 4.0 / 7};
  const auto res = close_periodic(f, chain_from_points(f, pts, true), doubling_cfg());
  EXPECT_EQ(*res.period, 3);
  EXPECT_LE(res.shadow_distance, 1e-15);
}

TEST(Close, PerturbedSevenCycle) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  const double d = cfg.delta / 4;
  const std::vector<double> pts{1.0 / 7 + d, 2.0 / 7 + 2 * d / 3, 4.0 / 7 - d};
  const auto res = close_periodic(f, chain_from_points(f, pts, true), cfg);
  EXPECT_EQ(*res.period, 3);
  EXPECT_NEAR(res.point, 1.0 / 7, 1e-10);
  for (double a : res.post_averages) EXPECT_NEAR(a, kLog2, 1e-15);
  EXPECT_LE(res.solve.residual, 1e-10);
  EXPECT_LE(res.solve.norm, cfg.delta / cfg.sigma + 1e-12);
  EXPECT_LE(uniqueness_spread(f, chain_from_points(f, pts, true), cfg, 5), 1e-10);
}

TEST(Close, GapAboveDeltaRejected) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  const std::vector<double> pts{1.0 / 7 + 0.001, 2.0 / 7 + 0.002, 4.0 / 7 + 0.004};
  EXPECT_THROW(close_periodic(f, chain_from_points(f, pts, true), cfg), GapTooLarge);
}

// the 2-cycle {1/3, 2/3} and the 3-cycle {1/7, 2/7, 4/7} are far apart, so
// a glued chain uses a split period-5 orbit: strings of lengths 2 and 3 cut
// out of the orbit of k/31, with their bases perturbed below delta
TEST(Close, TwoGluedStringsGivePeriodFive) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  Rng rng(5);
  for (int k = 1; k < 31; ++k) {
    std::vector<double> orbit{k / 31.0};
    for (int i = 0; i < 4; ++i) orbit.push_back(frac(2 * orbit.back()));
    std::vector<double> pts = orbit;
    pts[0] = frac(pts[0] + uniform(rng, -0.2, 0.2) * cfg.delta);
    pts[2] = frac(pts[2] + uniform(rng, -0.2, 0.2) * cfg.delta);
    const std::vector<std::size_t> len{2, 3};
    const auto chain = chain_from_segments(f, pts, len, true);
    ASSERT_EQ(chain.strings.size(), 2u);
    const auto res = close_periodic(f, chain, cfg);
    EXPECT_EQ(*res.period, 5);
    EXPECT_LE(oracle::distance_to_doubling_periodic(res.point, 5), 1e-12);
    EXPECT_NEAR(res.point, k / 31.0, 1e-12);
    EXPECT_LE(res.shadow_distance, cfg.epsilon);
  }
}

TEST(Close, SmoothMapClosingIsPeriodic) {
  const auto f = perturbed_doubling_map(0.3);
  const auto cfg = plan_shadowing(f, 0.5, 0.01);
  const auto orbit = periodic_orbit_from_itinerary(f, {0, 1, 1, 0, 1});
  Rng rng(3);
  std::vector<double> pts = orbit;
  for (auto& x : pts) x = frac(x + uniform(rng, -0.1, 0.1) * cfg.delta);
  const auto res = close_periodic(f, chain_from_points(f, pts, true), cfg);
  for (std::size_t j = 0; j < orbit.size(); ++j) EXPECT_LE(circle_distance(res.orbit[j], orbit[j]), 1e-12);
  EXPECT_LE(res.defect, 1e-12);
}

TEST(Close, OracleEquivalenceAllSmallPeriods) {
  const auto f = doubling_map();
  const auto cfg = doubling_cfg();
  Rng rng(31);
  for (int n = 1; n <= 12; ++n) {
    const double q = std::ldexp(1.0, n) - 1;
    for (int trial = 0; trial < 10; ++trial) {
      const auto k = static_cast<double>(below(rng, static_cast<std::uint64_t>(q)));
      std::vector<double> pts{k / q};
      for (int i = 1; i < n; ++i) pts.push_back(frac(2 * pts.back()));
      for (auto& x : pts) x = frac(x + uniform(rng, -0.25, 0.25) * cfg.delta);
      const auto res = close_periodic(f, chain_from_points(f, pts, true), cfg);
      EXPECT_LE(oracle::distance_to_doubling_periodic(res.point, n), 1e-8);
      EXPECT_GE(res.suffix_min_average, cfg.lambda - cfg.epsilon);
    }
  }
}

TEST(ShadowFinite, NoisyOrbitIsShadowed) {
  const auto f = perturbed_doubling_map(0.05);
  const auto cfg = plan_shadowing(f, 0.5, 0.01);
  Rng rng(44);
  const auto orbit = generic_orbit(f, 500, rng);
  std::vector<double> pts(orbit.begin(), orbit.end() - 1);
  for (auto& x : pts) x = frac(x + uniform(rng, -0.2, 0.2) * cfg.delta / (f.lipschitz_bound() + 1));
  const auto res = shadow_finite(f, chain_from_points(f, pts, false), cfg);
  EXPECT_LE(res.shadow_distance, cfg.epsilon);
  EXPECT_LE(res.defect, 1e-12);
}

TEST(Chain, NotQuasiExpandingRejected) {
  const auto f = neutral_fixed_map(0.5);
  const auto cfg = plan_shadowing(f, 0.3, 0.01);
  const std::vector<double> pts{0.0};
  EXPECT_THROW(close_periodic(f, chain_from_points(f, pts, true), cfg), NotQuasiExpanding);
}

}  // namespace
