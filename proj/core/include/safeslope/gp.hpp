#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "safeslope/grid.hpp"
#include "safeslope/kernel.hpp"

namespace safeslope {

/// Noisy observations y = f(x) + eta, eta ~ N(0, noise_variance).
/// Inputs are stored as rows; repeated inputs are allowed.
struct GpDataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd outputs;
  double noise_variance = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(outputs.size()); }
  void validate() const;
};

/// Joint Gaussian over a finite set of query points.
struct GpPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd stddev;

  static GpPosterior from_moments(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

/// Zero-mean GP conditioned on `data`, evaluated jointly at the rows of `queries`.
GpPosterior posterior(const KernelSpec& spec, const GpDataset& data,
                      const Eigen::Ref<const Eigen::MatrixXd>& queries);

/// Conditions a finite Gaussian on noisy observations of some of its entries.
///
/// `observed[k]` is the entry measured by `values[k]`; entries may repeat.
/// `scale` sets the jitter magnitude (normally the prior kernel variance).
GpPosterior condition(const GpPosterior& prior, std::span<const std::size_t> observed,
                      const Eigen::Ref<const Eigen::VectorXd>& values, double noise_variance,
                      double scale);

/// Draw from N(0, K_XX + jitter I) over every grid point.
Eigen::VectorXd sample_prior(const KernelSpec& spec, const GridDomain& grid, std::uint64_t seed);

/// Draw from N(0, K + jitter I) for an arbitrary point set.
Eigen::VectorXd sample_prior(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points,
                             std::uint64_t seed);

/// log N(Y | 0, K + noise I).
double log_marginal_likelihood(const KernelSpec& spec, const GpDataset& data);

}  // namespace safeslope
