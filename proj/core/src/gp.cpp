#include "safeslope/gp.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "safeslope/linalg.hpp"

namespace safeslope {

void GpDataset::validate() const {
  if (inputs.rows() != outputs.size())
    throw std::invalid_argument("dataset: input and output counts differ");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("dataset: noise variance must be >= 0");
}

GpPosterior GpPosterior::from_moments(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw std::invalid_argument("posterior: covariance shape does not match mean");
  GpPosterior out;
  out.stddev = covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.mean = std::move(mean);
  out.covariance = std::move(covariance);
  return out;
}

GpPosterior posterior(const KernelSpec& spec, const GpDataset& data,
                      const Eigen::Ref<const Eigen::MatrixXd>& queries) {
  spec.validate();
  data.validate();
  Eigen::MatrixXd k_qq = covariance_matrix(spec, queries);
  if (data.size() == 0) return GpPosterior::from_moments(Eigen::VectorXd::Zero(queries.rows()), std::move(k_qq));

  Eigen::MatrixXd system = covariance_matrix(spec, data.inputs);
  system.diagonal().array() += data.noise_variance;
  const CholeskyFactor factor = jittered_cholesky(system, spec.variance);
  const auto lower = factor.llt.matrixL();

  const Eigen::MatrixXd k_tq = covariance_matrix(spec, data.inputs, queries);
  const Eigen::VectorXd alpha = factor.llt.solve(data.outputs);
  Eigen::VectorXd mean = k_tq.transpose() * alpha;

  const Eigen::MatrixXd v = lower.solve(k_tq);
  k_qq.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), -1.0);
  Eigen::MatrixXd cov = k_qq.selfadjointView<Eigen::Lower>();
  return GpPosterior::from_moments(std::move(mean), std::move(cov));
}

GpPosterior condition(const GpPosterior& prior, std::span<const std::size_t> observed,
                      const Eigen::Ref<const Eigen::VectorXd>& values, double noise_variance,
                      double scale) {
  if (static_cast<Eigen::Index>(observed.size()) != values.size())
    throw std::invalid_argument("condition: index and value counts differ");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("condition: noise variance must be >= 0");
  if (observed.empty()) return prior;

  const auto n = static_cast<Eigen::Index>(prior.size());
  const auto t = static_cast<Eigen::Index>(observed.size());
  Eigen::MatrixXd cross(t, n);
  Eigen::VectorXd residual(t);
  for (Eigen::Index a = 0; a < t; ++a) {
    const auto ia = static_cast<Eigen::Index>(observed[static_cast<std::size_t>(a)]);
    if (ia >= n) throw std::out_of_range("condition: observed index out of range");
    cross.row(a) = prior.covariance.row(ia);
    residual[a] = values[a] - prior.mean[ia];
  }
  Eigen::MatrixXd system(t, t);
  for (Eigen::Index b = 0; b < t; ++b)
    for (Eigen::Index a = 0; a < t; ++a)
      system(a, b) = cross(a, static_cast<Eigen::Index>(observed[static_cast<std::size_t>(b)]));
  system.diagonal().array() += noise_variance;

  const CholeskyFactor factor = jittered_cholesky(system, scale);
  const auto lower = factor.llt.matrixL();
  const Eigen::MatrixXd v = lower.solve(cross);
  const Eigen::VectorXd w = lower.solve(residual);

  Eigen::VectorXd mean = prior.mean + v.transpose() * w;
  Eigen::MatrixXd cov = prior.covariance;
  cov.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), -1.0);
  Eigen::MatrixXd sym = cov.selfadjointView<Eigen::Lower>();
  return GpPosterior::from_moments(std::move(mean), std::move(sym));
}

Eigen::VectorXd sample_prior(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points,
                             std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(points.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  if (spec.variance == 0.0) return Eigen::VectorXd::Zero(points.rows());

  const CholeskyFactor factor = jittered_cholesky(covariance_matrix(spec, points), spec.variance, true);
  return factor.llt.matrixL() * z;
}

Eigen::VectorXd sample_prior(const KernelSpec& spec, const GridDomain& grid, std::uint64_t seed) {
  return sample_prior(spec, grid.points(), seed);
}

double log_marginal_likelihood(const KernelSpec& spec, const GpDataset& data) {
  spec.validate();
  data.validate();
  if (data.size() == 0) throw std::invalid_argument("log marginal likelihood: empty dataset");
  Eigen::MatrixXd system = covariance_matrix(spec, data.inputs);
  system.diagonal().array() += data.noise_variance;
  const CholeskyFactor factor = jittered_cholesky(system, spec.variance);
  const Eigen::VectorXd w = factor.llt.matrixL().solve(data.outputs);
  const double log_det = 2.0 * factor.llt.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(data.size());
  return -0.5 * w.squaredNorm() - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace safeslope
