#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "safeslope/analysis.hpp"
#include "safeslope/kernel.hpp"

using namespace safeslope;

namespace {

const double kScale = 0.5 / (1.0 - std::exp(-1.0));

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST(InfoGain, SingleEvaluationUsesTopEigenvalue) {
  const std::vector<double> lambda{4.0, 1.0, 0.5};
  const InfoGainBound b = info_gain_bound(lambda, 0.5, 1);
  EXPECT_NEAR(b.value, kScale * std::log(1.0 + 4.0 / 0.5), 1e-14);
  EXPECT_EQ(b.allocation, (std::vector<std::size_t>{1}));
}

TEST(InfoGain, EqualEigenvaluesGetOneUnitEach) {
  const std::vector<double> lambda(5, 2.0);
  const InfoGainBound b = info_gain_bound(lambda, 1.0, 5);
  EXPECT_EQ(b.allocation, (std::vector<std::size_t>(5, 1)));
  EXPECT_NEAR(b.value, kScale * 5.0 * std::log(3.0), 1e-13);
}

TEST(InfoGain, AllocationSumsToHorizonAndMatchesObjective) {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lambda(8);
    for (double& v : lambda) v = e(rng);
    lambda = sorted_desc(lambda);
    for (std::size_t t : {1u, 3u, 8u, 20u}) {
      const InfoGainBound b = info_gain_bound(lambda, 0.1, t);
      ASSERT_EQ(b.allocation.size(), t);
      EXPECT_EQ(std::accumulate(b.allocation.begin(), b.allocation.end(), std::size_t{0}), t);
      EXPECT_NEAR(b.value, kScale * allocation_objective(lambda, 0.1, b.allocation), 1e-12);
    }
  }
}

TEST(InfoGain, GreedyMatchesExhaustiveSearch) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> count(1, 3);
  std::exponential_distribution<double> e(0.7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lambda(static_cast<std::size_t>(count(rng)));
    for (double& v : lambda) v = e(rng);
    lambda = sorted_desc(lambda);
    const double noise = 0.01 + e(rng);
    for (std::size_t t = 1; t <= 6; ++t) {
      const double want = kScale * oracle::exhaustive_allocation(lambda, noise, t);
      EXPECT_NEAR(info_gain_bound(lambda, noise, t).value, want, 1e-12 * std::max(1.0, want));
    }
  }
}

TEST(InfoGain, CurveMatchesPointwiseBound) {
  const std::vector<double> lambda{3.0, 2.0, 0.7, 0.1, 0.01};
  const std::vector<double> curve = info_gain_bound_curve(lambda, 0.05, 30);
  ASSERT_EQ(curve.size(), 30u);
  for (std::size_t t = 1; t <= 30; ++t) EXPECT_NEAR(curve[t - 1], info_gain_bound(lambda, 0.05, t).value, 1e-11);
  for (std::size_t t = 1; t < 30; ++t) EXPECT_GT(curve[t], curve[t - 1]);
}

TEST(InfoGain, MissingEigenvaluesCountAsZero) {
  const std::vector<double> lambda{1.0};
  EXPECT_NEAR(info_gain_bound(lambda, 1.0, 4).value, kScale * std::log(1.0 + 4.0), 1e-14);
}

TEST(InfoGain, RejectsBadEigenvalues) {
  EXPECT_THROW(info_gain_bound(std::vector<double>{1.0, -0.5}, 1.0, 2), std::invalid_argument);
  EXPECT_THROW(info_gain_bound(std::vector<double>{1.0, 2.0}, 1.0, 2), std::invalid_argument);
}

TEST(InfoGain, DominatedEigenvaluesGiveSmallerBound) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> big(6), small(6);
    for (std::size_t i = 0; i < 6; ++i) {
      big[i] = 3 * u(rng);
      small[i] = big[i] * u(rng);
    }
    big = sorted_desc(big);
    small = sorted_desc(small);
    // Sorting preserves elementwise dominance of the order statistics.
    for (std::size_t t : {1u, 4u, 12u}) EXPECT_LE(info_gain_bound(small, 0.2, t).value, info_gain_bound(big, 0.2, t).value + 1e-12);
  }
}

TEST(InfoGain, HalvingErrorVarianceLowersBound) {
  const GridDomain g = build_grid(2, 6, {0, 0}, {1, 1});
  KernelSpec k;
  k.lengthscales = {0.5};
  const Eigen::VectorXd base = eigenvalues_descending(covariance_matrix(k, g.points()));
  k.variance = 0.5;
  const Eigen::VectorXd half = eigenvalues_descending(covariance_matrix(k, g.points()));
  const std::vector<double> a(base.data(), base.data() + base.size()), b(half.data(), half.data() + half.size());
  for (std::size_t t : {5u, 20u, 100u}) EXPECT_LT(info_gain_bound(b, 1e-4, t).value, info_gain_bound(a, 1e-4, t).value);
}

TEST(C1, Examples) {
  EXPECT_NEAR(c1(1.0, 1.0), 8.0 / std::log(2.0), 1e-14);
  EXPECT_NEAR(c1(1.0, 1.0), 11.5416, 1e-4);
  EXPECT_THROW(c1(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(c1(1.0, 0.0), std::invalid_argument);
}

TEST(C1, IncreasesWithNoise) {
  double prev = 0.0;
  for (double xi2 = 1e-6; xi2 < 10.0; xi2 *= 3.0) {
    const double v = c1(2.0, xi2);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ConvergenceTime, TrivialThresholdGivesOne) {
  const auto one = [](std::size_t) { return 1.0; };
  EXPECT_EQ(convergence_time(one, one, 0.5, 0, 1.0, 10), std::optional<std::size_t>(1));
}

TEST(ConvergenceTime, MatchesBruteForceScan) {
  const auto gamma = [](std::size_t t) { return std::log(1.0 + static_cast<double>(t)); };
  const auto beta = [](std::size_t t) { return 2.0 * std::log(10.0 * static_cast<double>(t * t)); };
  for (std::size_t reach : {0u, 3u, 10u}) {
    for (double eps : {2.0, 1.0, 0.5}) {
      const double threshold = 1.5 * static_cast<double>(reach + 1) / (eps * eps);
      std::optional<std::size_t> want;
      for (std::size_t t = 1; t <= 100000; ++t) {
        if (static_cast<double>(t) / (gamma(t) * beta(t)) >= threshold) {
          want = t;
          break;
        }
      }
      EXPECT_EQ(convergence_time(gamma, beta, 1.5, reach, eps, 100000), want);
    }
  }
}

TEST(ConvergenceTime, MonotoneInThreshold) {
  const auto gamma = [](std::size_t t) { return std::log(1.0 + static_cast<double>(t)); };
  const auto beta = [](std::size_t) { return 4.0; };
  std::size_t prev = 0;
  for (std::size_t reach = 0; reach < 20; ++reach) {
    const auto t = convergence_time(gamma, beta, 2.0, reach, 1.0, 1000000);
    ASSERT_TRUE(t.has_value());
    EXPECT_GE(*t, prev);
    prev = *t;
  }
}

TEST(ConvergenceTime, ReportsNotFoundAtCap) {
  const auto flat = [](std::size_t t) { return static_cast<double>(t); };
  EXPECT_FALSE(convergence_time(flat, flat, 2.0, 0, 1.0, 1000).has_value());
  EXPECT_THROW(convergence_time(flat, flat, 1.0, 0, 0.0, 10), std::invalid_argument);
}

TEST(Reachability, BarrierBelowEverythingKeepsSeed) {
  const GridDomain g = build_grid(2, 4, {0, 0}, {1, 1});
  const auto w = all_incidences(g);
  const SlopeBounds u{Eigen::VectorXd::Zero(12), Eigen::VectorXd::Zero(12)};
  const std::vector<std::size_t> seed{5, 6};
  const auto m = reachability_closure(g, w, Eigen::VectorXd::Constant(16, 1.0), u, seed, 0.0, 0.0);
  EXPECT_EQ(std::count(m.begin(), m.end(), 1), 2);
  EXPECT_TRUE(m[5] && m[6]);
}

TEST(Reachability, OneDimensionalHandFixpoint) {
  const GridDomain g = build_grid(1, 6, {0}, {5});
  const auto w = all_incidences(g);
  // f + slope * 1 + 0.5 <= 0 lets a point certify its neighbours.
  const Eigen::VectorXd f = (Eigen::VectorXd(6) << 0.0, -2.0, -3.0, -1.0, -4.0, -5.0).finished();
  const SlopeBounds u{Eigen::VectorXd::Constant(5, 1.0)};
  const std::vector<std::size_t> seed{2};
  const auto m = reachability_closure(g, w, f, u, seed, 0.0, 0.5);
  // 2 reaches 1 and 3; 1 reaches 0; 3 (f = -1) cannot reach 4.
  EXPECT_EQ(m, (std::vector<char>{1, 1, 1, 1, 0, 0}));
}

TEST(Reachability, MonotoneInSeedSet) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  const GridDomain g = build_grid(2, 6, {0, 0}, {1, 1});
  const auto w = all_incidences(g);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd f(36);
    for (auto& v : f) v = z(rng) - 0.5;
    SlopeBounds u{Eigen::VectorXd(30), Eigen::VectorXd(30)};
    for (auto& b : u)
      for (auto& v : b) v = std::abs(z(rng));
    const std::size_t a = rng() % 36, b = rng() % 36;
    const std::vector<std::size_t> small{a}, big{a, b};
    const auto ms = reachability_closure(g, w, f, u, small, 0.0, 0.1);
    const auto mb = reachability_closure(g, w, f, u, big, 0.0, 0.1);
    for (std::size_t p = 0; p < 36; ++p)
      if (ms[p]) EXPECT_TRUE(mb[p]);
    // Fixpoint: nothing else can be added.
    for (std::size_t p = 0; p < 36; ++p) {
      if (!mb[p]) continue;
      for (std::size_t axis = 0; axis < 2; ++axis)
        for (std::size_t y : g.vicinity(p, axis))
          if (f[static_cast<Eigen::Index>(p)] + u[axis][static_cast<Eigen::Index>(w[axis].edge_between(p, y))] * g.spacing(axis) + 0.1 <= 0.0)
            EXPECT_TRUE(mb[y]);
    }
  }
}

TEST(Regret, PrefixSums) {
  const std::vector<double> f{1.0, 0.5, -1.0};
  const std::vector<double> r = cumulative_regret(f, -1.0);
  EXPECT_EQ(r, (std::vector<double>{2.0, 3.5, 3.5}));
  EXPECT_TRUE(cumulative_regret(std::vector<double>{}, 0.0).empty());
}

TEST(Regret, NonDecreasingWhenOptimumIsBelow) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> f(100);
  for (double& v : f) v = -2.0 + e(rng);
  const std::vector<double> r = cumulative_regret(f, -2.0);
  for (std::size_t t = 1; t < r.size(); ++t) EXPECT_GE(r[t], r[t - 1]);
}
