#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "siftshadow/siftshadow.hpp"

using namespace siftshadow;

namespace {

TEST(Branches, DoublingDepthTwo) {
  const auto f = doubling_map();
  const auto b = enumerate_branches(f, 0.4, 2);
  ASSERT_EQ(b.size(), 4u);
  const double expect[4][2] = {{0.2, 0.1}, {0.2, 0.6}, {0.7, 0.35}, {0.7, 0.85}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(b[i].projection(), 0.4);
    EXPECT_NEAR(b[i].at(1), expect[i][0], 1e-15);
    EXPECT_NEAR(b[i].at(2), expect[i][1], 1e-15);
  }
}

TEST(Branches, DepthZeroIsThePoint) {
  const auto b = enumerate_branches(doubling_map(), 0.4, 0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].depth(), 0u);
  EXPECT_EQ(b[0].present, 0.4);
}

TEST(Branches, PerturbedMapDepthThree) {
  const auto f = perturbed_doubling_map(0.05);
  const auto b = enumerate_branches(f, 0.123, 3);
  ASSERT_EQ(b.size(), 8u);
  std::set<double> bottoms;
  for (const auto& x : b) {
    EXPECT_LE(branch_defect(f, x), 1e-10);
    bottoms.insert(x.at(3));
  }
  EXPECT_EQ(bottoms.size(), 8u);
}

TEST(Branches, CountIsDegreePower) {
  const auto f = power_map(doubling_map(), 2);
  for (std::size_t d = 0; d <= 4; ++d) EXPECT_EQ(enumerate_branches(f, 0.3, d).size(), std::size_t{1} << (2 * d));
  const auto co = bm_cocycle(2, 2);
  EXPECT_EQ(enumerate_branches(co, make_shift_point({0, 1, 1}, false), 5).size(), 32u);
}

TEST(Branches, DepthTooLarge) {
  EXPECT_THROW(enumerate_branches(doubling_map(), 0.3, 21), DepthTooLarge);
  EXPECT_NO_THROW(enumerate_branches(doubling_map(), 0.3, 20));
}

TEST(Metric, Examples) {
  const auto f = doubling_map();
  const BackwardBranch<double> a{0.4, {0.2, 0.1}};
  const BackwardBranch<double> b{0.4, {0.7, 0.35}};
  const auto m = extension_metric(f, a, b);
  EXPECT_NEAR(m.value, 0.5 * 0.5 + 0.25 * 0.25, 1e-15);
  EXPECT_EQ(m.depth, 2u);
  EXPECT_EQ(m.truncation_bound, 0.25);
  EXPECT_EQ(extension_metric(f, a, a).value, 0.0);
}

TEST(Metric, MixedDepthsUseTheShorter) {
  const auto f = doubling_map();
  const BackwardBranch<double> a{0.4, {0.2, 0.1}};
  const BackwardBranch<double> b{0.45, {0.225}};
  const auto m = extension_metric(f, a, b);
  EXPECT_EQ(m.depth, 1u);
  EXPECT_NEAR(m.value, 0.05 + 0.5 * 0.025, 1e-15);
}

TEST(Metric, TriangleInequality) {
  const auto f = doubling_map();
  Rng rng(77);
  const auto pool = enumerate_branches(f, 0.3, 8);
  const auto pool2 = enumerate_branches(f, 0.71, 8);
  std::vector<BackwardBranch<double>> all(pool);
  all.insert(all.end(), pool2.begin(), pool2.end());
  for (int t = 0; t < 10000; ++t) {
    const auto& x = all[below(rng, all.size())];
    const auto& y = all[below(rng, all.size())];
    const auto& z = all[below(rng, all.size())];
    const double xy = extension_metric(f, x, y).value;
    EXPECT_EQ(xy, extension_metric(f, y, x).value);
    ASSERT_LE(extension_metric(f, x, z).value, xy + extension_metric(f, y, z).value + 1e-15);
  }
}

TEST(TGamma, DoublingAlwaysPasses) {
  const auto f = doubling_map();
  const auto b = enumerate_branches(f, 0.3, 6);
  for (const auto& v : check_t_gamma_set(f, b, 2, 0.6, 4)) {
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.witness, 0u);
    EXPECT_EQ(v.r_max, 4u);
  }
}

TEST(TGamma, NeutralFixedBranchFails) {
  const auto f = neutral_fixed_map(0.5);
  const auto b = enumerate_branches(f, 0.0, 5);
  // branch 0 stays at the neutral fixed point
  EXPECT_LE(circle_distance(b[0].at(5), 0.0), 1e-12);
  const auto v = check_t_gamma_set(f, b, 2, 0.1, 3);
  EXPECT_FALSE(v[0].pass);
  EXPECT_FALSE(v[0].witness.has_value());
  EXPECT_EQ(v[0].failures.size(), 6u);
  // the branch jumping straight to 1/2 sees slope 2
  EXPECT_TRUE(v.back().pass);
}

TEST(TGamma, DepthTooSmall) {
  const auto f = doubling_map();
  const auto b = enumerate_branches(f, 0.3, 3);
  EXPECT_THROW(check_t_gamma_set(f, b, 2, 0.5, 2), DepthTooSmall);
  EXPECT_THROW(check_t_gamma_set(f, b, 0, 0.5, 2), BadParameters);
}

// windows scanned directly from the branch points with log f'
TEST(TGamma, PlTentAgreesWithWindowScan) {
  const auto f = pl_tent_map(3, 1.5);
  for (double x : {0.1, 0.45, 0.8}) {
    const auto b = enumerate_branches(f, x, 8);
    for (std::size_t t = 1; t <= 3; ++t) {
      for (double gamma : {0.3, 0.55, 0.8}) {
        const auto v = check_t_gamma_set(f, b, t, gamma, 5);
        for (std::size_t i = 0; i < b.size(); ++i) {
          std::optional<std::size_t> w;
          for (std::size_t m = 0; m < t && !w; ++m) {
            bool ok = true;
            for (std::size_t r = 1; r <= 5; ++r) {
              double s = 0;
              for (std::size_t k = m + 1; k <= m + r; ++k) s += std::log(f.derivative(b[i].at(k)));
              if (s / static_cast<double>(r) < gamma - 1e-12) ok = false;
            }
            if (ok) w = m;
          }
          ASSERT_EQ(v[i].pass, w.has_value());
          ASSERT_EQ(v[i].witness, w);
        }
      }
    }
  }
}

TEST(TGamma, CocycleBranches) {
  const auto co = bm_cocycle(2, 2);
  const auto b = enumerate_branches(co, make_shift_point({0, 1}, true), 4);
  const auto v = check_t_gamma_set(co, b, 1, -10.0, 3);
  for (const auto& x : v) EXPECT_TRUE(x.pass);
}

}  // namespace
