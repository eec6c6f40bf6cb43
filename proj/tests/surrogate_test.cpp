#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "maxhedge/oracles.hpp"
#include "maxhedge/projection.hpp"
#include "maxhedge/surrogate.hpp"
#include "test_support.hpp"

namespace maxhedge {
namespace {

std::vector<double> random_orthant_point(Rng& rng, std::size_t n, double hi) {
  std::vector<double> w(n);
  for (double& x : w) x = testing::uniform(rng, 0.0, hi);
  return w;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

TEST(Surrogate, VanishesAtOrigin) {
  Rng rng(41);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + rng() % 10;
    const auto trial = testing::random_trial(rng, n, 3.0, 2.0);
    ASSERT_EQ(surrogate_value(std::vector<double>(n, 0.0), trial, testing::uniform(rng, 0.01, 1.0)), 0.0);
  }
}

TEST(Surrogate, SingleRewardTerm) {
  const TrialData trial({2.0}, {0.0});
  EXPECT_NEAR(surrogate_value(std::vector<double>{1.0}, trial, 1.0), -2.0 * (1.0 - std::exp(-1.0)), 1e-15);
}

TEST(Surrogate, GradientExamples) {
  const double delta = 0.3;
  const auto g1 = surrogate_gradient(std::vector<double>{0.4}, TrialData({0.0}, {1.5}), delta);
  EXPECT_DOUBLE_EQ(g1[0], delta * 1.5);

  const auto view = sorted_view(std::vector<double>{0.0}, TrialData({1.0}, {0.0}), delta);
  EXPECT_EQ(view.epsilons[0], 1.0);
  EXPECT_EQ(view.lambdas[0], 1.0);
  const auto g2 = surrogate_gradient(std::vector<double>{0.0}, TrialData({1.0}, {0.0}), delta);
  EXPECT_DOUBLE_EQ(g2[0], -delta);
}

TEST(Surrogate, SortedViewInvariants) {
  Rng rng(42);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng() % 12;
    const auto trial = testing::random_trial(rng, n, 2.0, 1.0);
    const auto w = random_orthant_point(rng, n, 1.0);
    const auto view = sorted_view(w, trial, testing::uniform(rng, 0.01, 1.0));
    const auto r = trial.rewards();
    for (std::size_t j = 0; j < n; ++j) {
      ASSERT_GT(view.epsilons[j], 0.0);
      ASSERT_LE(view.epsilons[j], 1.0);
      ASSERT_GE(view.lambdas[j], 0.0);
      ASSERT_LE(view.lambdas[j], r[view.order[j]] + 1e-12);
      if (j > 0) {
        ASSERT_GE(r[view.order[j - 1]], r[view.order[j]]);
        if (r[view.order[j - 1]] == r[view.order[j]]) {
          ASSERT_LT(view.order[j - 1], view.order[j]);
        }
        ASSERT_LE(view.epsilons[j], view.epsilons[j - 1]);
        ASSERT_LE(view.lambdas[j], view.lambdas[j - 1] + 1e-12);
      }
    }
  }
}

TEST(Surrogate, GradientMatchesFiniteDifferences) {
  Rng rng(43);
  const double deltas[] = {0.01, 0.25, 1.0};
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 8;
    const double delta = deltas[k % 3];
    const auto trial = testing::random_trial(rng, n, 2.0, 1.0);
    const auto w = random_orthant_point(rng, n, 1.0);
    const auto g = surrogate_gradient(w, trial, delta);
    const auto fd = finite_diff_gradient(
        [&](std::span<const double> x) { return surrogate_value(x, trial, delta); }, w, 1e-5);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_LE(std::abs(g[i] - fd[i]) / std::max(std::abs(g[i]), 1.0), 1e-6) << "instance " << k;
    }
  }
}

TEST(Surrogate, GradientNormBound) {
  Rng rng(44);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 1 + rng() % 16;
    const double delta = testing::uniform(rng, 0.01, 1.0);
    const auto trial = testing::random_trial(rng, n, 3.0, 2.0);
    const auto w = random_orthant_point(rng, n, 1.0);
    const auto g = surrogate_gradient(w, trial, delta);
    double sq = 0.0;
    for (double x : g) sq += x * x;
    const double r_hat = max_abs(trial.rewards());
    const double c_hat = max_abs(trial.costs());
    ASSERT_LE(sq, static_cast<double>(n) * delta * delta * (r_hat + c_hat) * (r_hat + c_hat));
  }
}

TEST(Surrogate, MidpointConvexity) {
  Rng rng(45);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng() % 10;
    const double delta = testing::uniform(rng, 0.01, 1.0);
    const auto trial = testing::random_trial(rng, n, 3.0, 2.0);
    const auto a = random_orthant_point(rng, n, 3.0);
    const auto b = random_orthant_point(rng, n, 3.0);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = 0.5 * (a[i] + b[i]);
    ASSERT_LE(surrogate_value(m, trial, delta),
              0.5 * (surrogate_value(a, trial, delta) + surrogate_value(b, trial, delta)) + 1e-9);
  }
}

TEST(Surrogate, TieOrderDoesNotMatter) {
  Rng rng(46);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + rng() % 8;
    std::vector<double> r(n), c(n);
    // Only three distinct reward levels, so ties are everywhere.
    for (double& x : r) x = static_cast<double>(rng() % 3);
    for (double& x : c) x = testing::uniform(rng, -1.0, 1.0);
    const TrialData trial(r, c);
    const auto w = random_orthant_point(rng, n, 1.0);
    const double delta = testing::uniform(rng, 0.05, 1.0);

    auto shuffled = reward_order(r);
    // Reverse each run of equal rewards.
    for (std::size_t j = 0; j < n;) {
      std::size_t e = j;
      while (e < n && r[shuffled[e]] == r[shuffled[j]]) ++e;
      std::reverse(shuffled.begin() + static_cast<std::ptrdiff_t>(j), shuffled.begin() + static_cast<std::ptrdiff_t>(e));
      j = e;
    }
    const auto g_default = surrogate_gradient(w, trial, delta);
    const auto g_other = surrogate_gradient(sorted_view(w, trial, delta, shuffled), w, trial, delta);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(g_default[i], g_other[i], 1e-14);
  }
}

TEST(UpdateWeights, ZeroGradientKeepsWeights) {
  WeightState s = WeightState::initial(2);
  s.w = {0.3, 0.4};
  s.eta_prime = 1.0;
  const auto next = update_weights(s, std::vector<double>{0.0, 0.0}, std::vector<double>{0.2, 0.2});
  EXPECT_EQ(next.w, s.w);
  EXPECT_EQ(next.trial_index, 2u);
  EXPECT_EQ(next.eta_prime, 1.0);
}

TEST(UpdateWeights, ZeroGradientBeforeAnyStepIsSkipped) {
  const auto next = update_weights(WeightState::initial(3), std::vector<double>(3, 0.0),
                                   std::vector<double>{0.1, 0.1, 0.1});
  EXPECT_FALSE(next.eta_prime.has_value());
  EXPECT_EQ(next.w, std::vector<double>(3, 0.0));
  EXPECT_EQ(next.last_step, 0.0);
  EXPECT_EQ(next.trial_index, 2u);
}

TEST(UpdateWeights, FirstStepClampsNegativeCoordinate) {
  const auto next = update_weights(WeightState::initial(1), std::vector<double>{0.5}, std::vector<double>{0.0});
  ASSERT_TRUE(next.eta_prime.has_value());
  EXPECT_DOUBLE_EQ(*next.eta_prime, 2.0);
  EXPECT_DOUBLE_EQ(next.last_step, std::sqrt(2.0));
  EXPECT_EQ(next.w, std::vector<double>{0.0});
}

TEST(UpdateWeights, LearningRateIsRunningMinimum) {
  WeightState s = WeightState::initial(1);
  const std::vector<double> z{0.0};
  std::vector<double> seen;
  for (double norm : {1.0, 2.0, 0.5}) {
    s = update_weights(s, std::vector<double>{-norm}, z);
    seen.push_back(*s.eta_prime);
  }
  EXPECT_EQ(seen, (std::vector<double>{1.0, 0.5, 0.5}));
}

TEST(UpdateWeights, StaysFeasibleAndMonotone) {
  Rng rng(47);
  for (int run = 0; run < 50; ++run) {
    const std::size_t n = 1 + rng() % 20;
    const auto z = testing::random_energies(rng, n, 0.49);
    WeightState s = WeightState::initial(n);
    std::optional<double> previous;
    for (int t = 0; t < 100; ++t) {
      const auto trial = testing::random_trial(rng, n, 1.0, 1.0);
      s = update_weights(s, surrogate_gradient(s.w, trial, 0.3), z);
      ASSERT_TRUE(is_feasible(s.w, z, 1e-12));
      if (previous) {
        ASSERT_LE(*s.eta_prime, *previous);
      }
      previous = s.eta_prime;
    }
  }
}

}  // namespace
}  // namespace maxhedge
