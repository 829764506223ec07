#include "safeslope/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace safeslope {

GridDomain::GridDomain(std::size_t dims, std::size_t resolution, std::vector<double> lower,
                       std::vector<double> upper)
    : dims_(dims), resolution_(resolution), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (dims_ == 0) throw std::invalid_argument("grid: dims must be positive");
  if (resolution_ < 2) throw std::invalid_argument("grid: resolution must be at least 2");
  if (lower_.size() != dims_ || upper_.size() != dims_)
    throw std::invalid_argument("grid: bounds must have one entry per dimension");

  spacing_.resize(dims_);
  strides_.resize(dims_);
  std::size_t stride = 1;
  for (std::size_t i = 0; i < dims_; ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw std::invalid_argument("grid: lower bound must be below upper bound on axis " +
                                  std::to_string(i));
    spacing_[i] = (upper_[i] - lower_[i]) / static_cast<double>(resolution_ - 1);
    strides_[i] = stride;
    if (stride > std::numeric_limits<std::size_t>::max() / resolution_)
      throw std::invalid_argument("grid: too many points");
    stride *= resolution_;
  }
  size_ = stride;
}

GridDomain build_grid(std::size_t dims, std::size_t resolution, std::vector<double> lower,
                      std::vector<double> upper) {
  return GridDomain(dims, resolution, std::move(lower), std::move(upper));
}

void GridDomain::check_point(std::size_t point) const {
  if (point >= size_) throw std::out_of_range("grid: point index out of range");
}

std::vector<std::size_t> GridDomain::multi_index(std::size_t point) const {
  check_point(point);
  std::vector<std::size_t> multi(dims_);
  for (std::size_t i = 0; i < dims_; ++i) {
    multi[i] = point % resolution_;
    point /= resolution_;
  }
  return multi;
}

std::size_t GridDomain::point_index(std::span<const std::size_t> multi) const {
  if (multi.size() != dims_) throw std::invalid_argument("grid: multi-index has wrong length");
  std::size_t point = 0;
  for (std::size_t i = 0; i < dims_; ++i) {
    if (multi[i] >= resolution_) throw std::out_of_range("grid: multi-index out of range");
    point += multi[i] * strides_[i];
  }
  return point;
}

double GridDomain::coordinate(std::size_t point, std::size_t axis) const {
  check_point(point);
  if (axis >= dims_) throw std::out_of_range("grid: axis out of range");
  const std::size_t k = (point / strides_[axis]) % resolution_;
  if (k == resolution_ - 1) return upper_[axis];
  return lower_[axis] + static_cast<double>(k) * spacing_[axis];
}

Eigen::VectorXd GridDomain::coordinates(std::size_t point) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dims_));
  for (std::size_t i = 0; i < dims_; ++i) x[static_cast<Eigen::Index>(i)] = coordinate(point, i);
  return x;
}

Eigen::MatrixXd GridDomain::points() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(dims_));
  for (std::size_t p = 0; p < size_; ++p)
    for (std::size_t i = 0; i < dims_; ++i)
      out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) = coordinate(p, i);
  return out;
}

Eigen::MatrixXd GridDomain::points(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(dims_));
  for (std::size_t r = 0; r < indices.size(); ++r)
    for (std::size_t i = 0; i < dims_; ++i)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = coordinate(indices[r], i);
  return out;
}

std::vector<std::size_t> GridDomain::vicinity(std::size_t point, std::size_t axis) const {
  check_point(point);
  if (axis >= dims_) throw std::out_of_range("grid: axis out of range");
  const std::size_t k = (point / strides_[axis]) % resolution_;
  std::vector<std::size_t> out;
  out.reserve(2);
  if (k > 0) out.push_back(point - strides_[axis]);
  if (k + 1 < resolution_) out.push_back(point + strides_[axis]);
  return out;
}

std::size_t GridDomain::upper_neighbor(std::size_t point, std::size_t axis) const {
  check_point(point);
  const std::size_t k = (point / strides_[axis]) % resolution_;
  return k + 1 < resolution_ ? point + strides_[axis] : size_;
}

std::size_t IncidenceMatrix::edge_between(std::size_t a, std::size_t b) const {
  const std::size_t lo = a < b ? a : b;
  const std::size_t hi = a < b ? b : a;
  if (lo >= row_by_lower.size() || row_by_lower[lo] < 0 ||
      edges[static_cast<std::size_t>(row_by_lower[lo])].second != hi)
    throw std::invalid_argument("incidence: points are not adjacent along this axis");
  return static_cast<std::size_t>(row_by_lower[lo]);
}

IncidenceMatrix incidence(const GridDomain& grid, std::size_t axis) {
  if (axis >= grid.dims()) throw std::out_of_range("incidence: axis out of range");

  IncidenceMatrix w;
  w.axis = axis;
  w.spacing = grid.spacing(axis);
  w.row_by_lower.assign(grid.size(), -1);

  const std::size_t r = grid.resolution();
  w.edges.reserve(grid.size() / r * (r - 1));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const std::size_t q = grid.upper_neighbor(p, axis);
    if (q == grid.size()) continue;
    w.row_by_lower[p] = static_cast<std::ptrdiff_t>(w.edges.size());
    w.edges.emplace_back(p, q);
  }

  const double inv = 1.0 / w.spacing;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * w.edges.size());
  for (std::size_t e = 0; e < w.edges.size(); ++e) {
    const auto row = static_cast<Eigen::Index>(e);
    triplets.emplace_back(row, static_cast<Eigen::Index>(w.edges[e].first), -inv);
    triplets.emplace_back(row, static_cast<Eigen::Index>(w.edges[e].second), inv);
  }
  w.matrix.resize(static_cast<Eigen::Index>(w.edges.size()), static_cast<Eigen::Index>(grid.size()));
  w.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

std::vector<IncidenceMatrix> all_incidences(const GridDomain& grid) {
  std::vector<IncidenceMatrix> out;
  out.reserve(grid.dims());
  for (std::size_t i = 0; i < grid.dims(); ++i) out.push_back(incidence(grid, i));
  return out;
}

double discretization_gap_bound(const GridDomain& grid, double lipschitz) {
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("gap bound: Lipschitz constant must be >= 0");
  const double dx = grid.spacing(0);
  for (std::size_t i = 1; i < grid.dims(); ++i) {
    if (std::abs(grid.spacing(i) - dx) > 1e-12 * dx)
      throw std::invalid_argument("gap bound: requires equal spacing on every axis");
  }
  return dx * std::sqrt(static_cast<double>(grid.dims())) / 2.0 * lipschitz;
}

}  // namespace safeslope
