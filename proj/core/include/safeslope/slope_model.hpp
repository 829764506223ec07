#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"

namespace safeslope {

/// Gaussian over axis-wise finite-difference slopes, one block per axis.
/// Block i is the image of the function posterior under the incidence matrix W_i.
struct SlopeField {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> covariance;
  std::vector<Eigen::VectorXd> stddev;

  std::size_t axes() const { return mean.size(); }
};

/// Per-axis, per-edge slope magnitude bounds.  +inf means "no bound yet".
using SlopeBounds = std::vector<Eigen::VectorXd>;

SlopeField slope_field(const GpPosterior& posterior, std::span<const IncidenceMatrix> incidences);

/// Largest magnitude of the slope confidence interval:
/// max(|mu - sqrt(beta) sigma|, |mu + sqrt(beta) sigma|).
SlopeBounds slope_magnitude_bound(const SlopeField& field, double beta_m);

/// All-infinite bounds shaped like the incidence matrices.
SlopeBounds initial_slope_bounds(std::span<const IncidenceMatrix> incidences);

/// Elementwise running minimum, bounds := min(bounds, q).
void update_slope_bounds(SlopeBounds& bounds, const SlopeBounds& q);

}  // namespace safeslope
