#include "safeslope/slope_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace safeslope {

SlopeField slope_field(const GpPosterior& posterior, std::span<const IncidenceMatrix> incidences) {
  SlopeField field;
  field.mean.reserve(incidences.size());
  field.covariance.reserve(incidences.size());
  field.stddev.reserve(incidences.size());
  for (const IncidenceMatrix& w : incidences) {
    if (w.matrix.cols() != posterior.mean.size())
      throw std::invalid_argument("slope field: posterior does not cover the grid");
    field.mean.push_back(w.matrix * posterior.mean);
    const Eigen::MatrixXd kw = posterior.covariance * w.matrix.transpose();
    Eigen::MatrixXd cov = w.matrix * kw;
    cov = 0.5 * (cov + cov.transpose());
    field.stddev.push_back(cov.diagonal().cwiseMax(0.0).cwiseSqrt());
    field.covariance.push_back(std::move(cov));
  }
  return field;
}

SlopeBounds slope_magnitude_bound(const SlopeField& field, double beta_m) {
  if (!(beta_m >= 0.0)) throw std::invalid_argument("slope bound: beta must be >= 0");
  const double root = std::sqrt(beta_m);
  SlopeBounds q;
  q.reserve(field.axes());
  for (std::size_t i = 0; i < field.axes(); ++i) {
    const Eigen::ArrayXd lo = field.mean[i].array() - root * field.stddev[i].array();
    const Eigen::ArrayXd hi = field.mean[i].array() + root * field.stddev[i].array();
    q.emplace_back(lo.abs().max(hi.abs()).matrix());
  }
  return q;
}

SlopeBounds initial_slope_bounds(std::span<const IncidenceMatrix> incidences) {
  SlopeBounds bounds;
  bounds.reserve(incidences.size());
  for (const IncidenceMatrix& w : incidences)
    bounds.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(w.rows()),
                                               std::numeric_limits<double>::infinity()));
  return bounds;
}

void update_slope_bounds(SlopeBounds& bounds, const SlopeBounds& q) {
  if (bounds.size() != q.size()) throw std::invalid_argument("slope bounds: axis count mismatch");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (bounds[i].size() != q[i].size()) throw std::invalid_argument("slope bounds: edge count mismatch");
    bounds[i] = bounds[i].cwiseMin(q[i]);
  }
}

}  // namespace safeslope
