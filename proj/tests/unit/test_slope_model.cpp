#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/slope_model.hpp"

using namespace safeslope;

namespace {

GpPosterior random_posterior(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto& v : g.reshaped()) v = z(rng);
  Eigen::VectorXd mean(static_cast<Eigen::Index>(n));
  for (auto& v : mean) v = z(rng);
  return GpPosterior::from_moments(mean, g * g.transpose());
}

SlopeField single_edge(double mean, double sd) {
  SlopeField f;
  f.mean = {Eigen::VectorXd::Constant(1, mean)};
  f.covariance = {Eigen::MatrixXd::Constant(1, 1, sd * sd)};
  f.stddev = {Eigen::VectorXd::Constant(1, sd)};
  return f;
}

}  // namespace

TEST(SlopeField, ConstantMeanGivesZeroSlopes) {
  const GridDomain g = build_grid(2, 4, {0, 0}, {1, 1});
  const auto w = all_incidences(g);
  const GpPosterior p = GpPosterior::from_moments(Eigen::VectorXd::Constant(16, 3.0), Eigen::MatrixXd::Identity(16, 16));
  const SlopeField s = slope_field(p, w);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(s.mean[i].cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SlopeField, LinearMeanGivesUnitSlopesAlongItsAxis) {
  const GridDomain g = build_grid(2, 5, {0, 0}, {2, 1});
  const auto w = all_incidences(g);
  Eigen::VectorXd mean(25);
  for (std::size_t p = 0; p < 25; ++p) mean[static_cast<Eigen::Index>(p)] = g.coordinate(p, 0);
  const SlopeField s = slope_field(GpPosterior::from_moments(mean, Eigen::MatrixXd::Zero(25, 25)), w);
  EXPECT_LT((s.mean[0].array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(s.mean[1].cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SlopeField, CovarianceMatchesPairwiseFiniteDifferences) {
  std::mt19937_64 rng(1);
  const GridDomain g = build_grid(2, 3, {0, 0}, {1, 2});
  const auto w = all_incidences(g);
  const GpPosterior p = random_posterior(rng, 9);
  const SlopeField s = slope_field(p, w);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const double d = g.spacing(axis);
    for (std::size_t e = 0; e < w[axis].rows(); ++e) {
      for (std::size_t f = 0; f < w[axis].rows(); ++f) {
        const auto [a, b] = w[axis].edges[e];
        const auto [c, dd] = w[axis].edges[f];
        const auto k = [&](std::size_t i, std::size_t j) {
          return p.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        };
        // cov((f_b - f_a)/d, (f_dd - f_c)/d)
        const double want = (k(b, dd) - k(b, c) - k(a, dd) + k(a, c)) / (d * d);
        EXPECT_NEAR(s.covariance[axis](static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f)), want, 1e-10);
      }
    }
    EXPECT_TRUE(s.covariance[axis].isApprox(s.covariance[axis].transpose()));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.covariance[axis]).eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(SlopeField, MeanIsLinear) {
  std::mt19937_64 rng(2);
  const GridDomain g = build_grid(2, 4, {0, 0}, {1, 1});
  const auto w = all_incidences(g);
  const GpPosterior a = random_posterior(rng, 16), b = random_posterior(rng, 16);
  const GpPosterior combo = GpPosterior::from_moments(2.5 * a.mean + b.mean, a.covariance);
  const SlopeField sa = slope_field(a, w), sb = slope_field(b, w), sc = slope_field(combo, w);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LT((sc.mean[i] - (2.5 * sa.mean[i] + sb.mean[i])).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SlopeField, RejectsMismatchedPosterior) {
  const GridDomain g = build_grid(1, 4, {0}, {1});
  const auto w = all_incidences(g);
  EXPECT_THROW(slope_field(GpPosterior::from_moments(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(3, 3)), w),
               std::invalid_argument);
}

TEST(SlopeMagnitudeBound, Examples) {
  EXPECT_DOUBLE_EQ(slope_magnitude_bound(single_edge(-1.5, 2.0), 0.0)[0][0], 1.5);
  EXPECT_DOUBLE_EQ(slope_magnitude_bound(single_edge(0.0, 1.0), 4.0)[0][0], 2.0);
  EXPECT_DOUBLE_EQ(slope_magnitude_bound(single_edge(-3.0, 1.0), 1.0)[0][0], 4.0);
  EXPECT_THROW(slope_magnitude_bound(single_edge(0.0, 1.0), -1.0), std::invalid_argument);
}

TEST(SlopeMagnitudeBound, NeverBelowAbsoluteMean) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int i = 0; i < 200; ++i) {
    const double mu = 3 * z(rng), sd = std::abs(z(rng));
    EXPECT_GE(slope_magnitude_bound(single_edge(mu, sd), std::abs(z(rng)))[0][0], std::abs(mu));
  }
}

TEST(SlopeBounds, StartInfiniteAndTakeRunningMin) {
  const GridDomain g = build_grid(1, 2, {0}, {1});
  const auto w = all_incidences(g);
  SlopeBounds u = initial_slope_bounds(w);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_TRUE(std::isinf(u[0][0]));
  std::vector<double> seen;
  for (double q : {5.0, 3.0, 4.0}) {
    update_slope_bounds(u, SlopeBounds{Eigen::VectorXd::Constant(1, q)});
    seen.push_back(u[0][0]);
  }
  EXPECT_EQ(seen, (std::vector<double>{5.0, 3.0, 3.0}));
}

TEST(SlopeBounds, RunningMinNeverIncreases) {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> e(0.5);
  SlopeBounds u{Eigen::VectorXd::Constant(20, std::numeric_limits<double>::infinity())};
  for (int t = 0; t < 50; ++t) {
    const SlopeBounds before = u;
    Eigen::VectorXd q(20);
    for (auto& v : q) v = e(rng);
    update_slope_bounds(u, SlopeBounds{q});
    EXPECT_TRUE((u[0].array() <= before[0].array()).all());
  }
}

TEST(SlopeBounds, ShapeMismatchRejected) {
  SlopeBounds u{Eigen::VectorXd::Zero(2)};
  EXPECT_THROW(update_slope_bounds(u, SlopeBounds{Eigen::VectorXd::Zero(3)}), std::invalid_argument);
  EXPECT_THROW(update_slope_bounds(u, SlopeBounds{}), std::invalid_argument);
}
