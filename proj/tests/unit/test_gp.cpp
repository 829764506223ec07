#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/linalg.hpp"
#include "safeslope/safe_search.hpp"

using namespace safeslope;

namespace {

KernelSpec matern(double variance, double ls) {
  KernelSpec s;
  s.variance = variance;
  s.lengthscales = {ls};
  return s;
}

Eigen::MatrixXd uniform_points(std::mt19937_64& rng, int n, int dims) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(n, dims);
  for (auto& v : x.reshaped()) v = u(rng);
  return x;
}

Eigen::VectorXd normals(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> z;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

}  // namespace

TEST(Posterior, EmptyDatasetIsPrior) {
  const KernelSpec s = matern(2.0, 0.5);
  GpDataset data;
  data.inputs.resize(0, 1);
  const Eigen::MatrixXd q = Eigen::VectorXd::LinSpaced(5, 0, 1);
  const GpPosterior p = posterior(s, data, q);
  EXPECT_EQ(p.mean, Eigen::VectorXd::Zero(5));
  EXPECT_EQ(p.covariance, covariance_matrix(s, q));
  for (double sd : p.stddev) EXPECT_DOUBLE_EQ(sd, std::sqrt(2.0));
}

TEST(Posterior, NoiseFreeObservationInterpolates) {
  const KernelSpec s = matern(1.0, 0.5);
  GpDataset data{Eigen::MatrixXd::Constant(1, 1, 0.3), Eigen::VectorXd::Constant(1, 1.7), 0.0};
  const GpPosterior p = posterior(s, data, Eigen::MatrixXd::Constant(1, 1, 0.3));
  EXPECT_NEAR(p.mean[0], 1.7, 1e-6);
  EXPECT_NEAR(p.stddev[0], 0.0, 1e-6);
}

TEST(Posterior, MatchesDenseInverseOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const KernelSpec s = matern(1.5, 0.4);
    GpDataset data{uniform_points(rng, 3, 2), normals(rng, 3), 0.01};
    const Eigen::MatrixXd q = uniform_points(rng, 5, 2);
    const GpPosterior got = posterior(s, data, q);
    const oracle::Moments want =
        oracle::dense_condition(covariance_matrix(s, q), covariance_matrix(s, q, data.inputs),
                                covariance_matrix(s, data.inputs), data.outputs, Eigen::VectorXd::Constant(3, 0.01));
    EXPECT_LT((got.mean - want.mean).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, want.mean.cwiseAbs().maxCoeff()));
    EXPECT_LT((got.covariance - want.covariance).cwiseAbs().maxCoeff(), 1e-8 * s.variance);
  }
}

TEST(Posterior, RepeatedInputsStaySeparateRows) {
  const KernelSpec s = matern(1.0, 0.5);
  Eigen::MatrixXd x(2, 1);
  x << 0.5, 0.5;
  GpDataset data{x, Eigen::Vector2d(1.0, 3.0), 0.1};
  const GpPosterior p = posterior(s, data, Eigen::MatrixXd::Constant(1, 1, 0.5));
  // Two noisy looks at one value: mean of y shrunk by 2 / (2 + noise).
  EXPECT_NEAR(p.mean[0], 2.0 * 2.0 / (2.0 + 0.1), 1e-12);
  EXPECT_NEAR(p.covariance(0, 0), 1.0 - 2.0 / (2.0 + 0.1), 1e-12);
}

TEST(Posterior, VarianceNeverExceedsPriorAndShrinksWithData) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> count(1, 30);
  for (int trial = 0; trial < 40; ++trial) {
    const KernelSpec s = matern(1.2, 0.3);
    const int n = count(rng);
    GpDataset data{uniform_points(rng, n, 2), normals(rng, n), 1e-3};
    const Eigen::MatrixXd q = uniform_points(rng, 10, 2);
    const GpPosterior p = posterior(s, data, q);
    EXPECT_LE(p.stddev.maxCoeff(), std::sqrt(s.variance) + 1e-9);

    GpDataset more = data;
    more.inputs.conservativeResize(n + 1, 2);
    more.inputs.row(n) = uniform_points(rng, 1, 2);
    more.outputs.conservativeResize(n + 1);
    more.outputs[n] = 0.0;
    const GpPosterior p2 = posterior(s, more, q);
    EXPECT_TRUE(((p2.stddev.array() - p.stddev.array()) <= 1e-9).all());
  }
}

TEST(Condition, MatchesDenseOracleOnGrid) {
  std::mt19937_64 rng(31);
  const GridDomain g = build_grid(2, 5, {0, 0}, {1, 1});
  const KernelSpec s = matern(1.0, 0.5);
  const Eigen::MatrixXd pts = g.points();
  const Eigen::MatrixXd k = covariance_matrix(s, pts);
  const GpPosterior prior = GpPosterior::from_moments(Eigen::VectorXd::Zero(25), k);
  const std::vector<std::size_t> obs{3, 7, 7, 12, 24};
  const Eigen::VectorXd y = normals(rng, 5);
  const GpPosterior got = condition(prior, obs, y, 1e-4, 1.0);
  const Eigen::MatrixXd op = g.points(obs);
  const oracle::Moments want = oracle::dense_condition(k, covariance_matrix(s, pts, op), covariance_matrix(s, op), y,
                                                       Eigen::VectorXd::Constant(5, 1e-4));
  EXPECT_LT((got.mean - want.mean).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((got.covariance - want.covariance).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Condition, RejectsBadIndices) {
  const GpPosterior prior = GpPosterior::from_moments(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  const std::vector<std::size_t> obs{5};
  EXPECT_THROW(condition(prior, obs, Eigen::VectorXd::Zero(1), 0.1, 1.0), std::out_of_range);
  EXPECT_THROW(condition(prior, obs, Eigen::VectorXd::Zero(2), 0.1, 1.0), std::invalid_argument);
}

TEST(Jitter, EscalatesOnSingularMatrices) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
  const CholeskyFactor f = jittered_cholesky(ones, 1.0);
  EXPECT_GT(f.jitter, 0.0);
  EXPECT_LE(f.jitter, 1e-4);
  EXPECT_EQ(jittered_cholesky(Eigen::MatrixXd::Identity(2, 2), 1.0).jitter, 0.0);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(jittered_cholesky(indefinite, 1.0), IllConditionedError);
}

TEST(SamplePrior, DeterministicForSeed) {
  const GridDomain g = build_grid(2, 4, {0, 0}, {1, 1});
  const KernelSpec s = matern(1.0, 0.5);
  EXPECT_EQ(sample_prior(s, g, 42), sample_prior(s, g, 42));
  EXPECT_NE(sample_prior(s, g, 42), sample_prior(s, g, 43));
}

TEST(SamplePrior, ZeroVarianceGivesZeros) {
  const GridDomain g = build_grid(1, 4, {0}, {1});
  EXPECT_EQ(sample_prior(matern(0.0, 1.0), g, 1), Eigen::VectorXd::Zero(4));
}

TEST(SamplePrior, EmpiricalCorrelationMatchesKernel) {
  KernelSpec s;
  s.family = KernelFamily::SquaredExponential;
  s.variance = 1.0;
  s.lengthscales = {1.0};
  const double d = std::sqrt(2.0 * std::log(2.0));  // k(x, x') = 0.5
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, d;
  ASSERT_NEAR(kernel_eval(s, pts.row(0).transpose(), pts.row(1).transpose()), 0.5, 1e-12);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Eigen::VectorXd v = sample_prior(s, pts, seed);
    sxy += v[0] * v[1];
    sxx += v[0] * v[0];
    syy += v[1] * v[1];
  }
  EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 0.5, 0.05);
}

TEST(LogMarginalLikelihood, SingleZeroObservation) {
  GpDataset data{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), 0.25};
  EXPECT_NEAR(log_marginal_likelihood(matern(0.75, 1.0), data), -0.5 * std::log(2 * std::numbers::pi), 1e-14);
}

TEST(LogMarginalLikelihood, IndependentPointsFactorize) {
  KernelSpec s;
  s.family = KernelFamily::SquaredExponential;
  s.variance = 1.0;
  s.lengthscales = {1e-3};
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 10.0;
  GpDataset data{x, Eigen::Vector2d(0.5, -1.0), 0.5};
  const auto uni = [](double y, double var) { return -0.5 * (y * y / var + std::log(2 * std::numbers::pi * var)); };
  EXPECT_NEAR(log_marginal_likelihood(s, data), uni(0.5, 1.5) + uni(-1.0, 1.5), 1e-12);
}

TEST(LogMarginalLikelihood, MatchesDeterminantOracle) {
  std::mt19937_64 rng(37);
  const KernelSpec s = matern(1.3, 0.6);
  GpDataset data{uniform_points(rng, 4, 2), normals(rng, 4), 0.05};
  Eigen::MatrixXd c = covariance_matrix(s, data.inputs);
  c.diagonal().array() += 0.05;
  const double want = -0.5 * data.outputs.dot(c.inverse() * data.outputs) - 0.5 * std::log(c.determinant()) -
                      2.0 * std::log(2 * std::numbers::pi);
  EXPECT_NEAR(log_marginal_likelihood(s, data), want, 1e-8);
  GpDataset empty;
  EXPECT_THROW(log_marginal_likelihood(s, empty), std::invalid_argument);
}

// Confidence-band coverage: prior draws on a 25-point grid, t <= 20 noisy
// observations, beta_f from the pi_t schedule.
TEST(Coverage, UcbBoundHoldsForPriorSamples) {
  const GridDomain g = build_grid(2, 5, {0, 0}, {1, 1});
  const KernelSpec s = matern(1.0, 0.4);
  const double noise = 1e-2, delta = 0.1;
  const Eigen::MatrixXd k = covariance_matrix(s, g.points());
  const GpPosterior prior = GpPosterior::from_moments(Eigen::VectorXd::Zero(25), k);
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> pick(0, 24), steps(1, 20);
  std::normal_distribution<double> eta(0.0, std::sqrt(noise));
  int violations = 0;
  const int samples = 500;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd f = sample_prior(s, g, 1000 + static_cast<std::uint64_t>(i));
    const std::size_t t = steps(rng);
    std::vector<std::size_t> obs;
    Eigen::VectorXd y(static_cast<Eigen::Index>(t));
    for (std::size_t j = 0; j < t; ++j) {
      obs.push_back(pick(rng));
      y[static_cast<Eigen::Index>(j)] = f[static_cast<Eigen::Index>(obs.back())] + eta(rng);
    }
    const GpPosterior p = condition(prior, obs, y, noise, 1.0);
    const double root = std::sqrt(beta_f(t, 25, delta));
    if (((f - p.mean).cwiseAbs().array() > root * p.stddev.array()).any()) ++violations;
  }
  EXPECT_LE(static_cast<double>(violations) / samples, delta + 0.03);
}
