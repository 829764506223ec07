#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace safeslope {

/// Uniform hypercubic grid with r points per axis.
///
/// Points are enumerated row-major with axis 0 varying fastest, so the
/// multi-index (k_0, ..., k_{n-1}) maps to sum_i k_i * r^i.  Coordinates of
/// the first and last index on every axis are exactly the configured bounds.
class GridDomain {
 public:
  GridDomain(std::size_t dims, std::size_t resolution, std::vector<double> lower,
             std::vector<double> upper);

  std::size_t dims() const { return dims_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return size_; }

  double lower(std::size_t axis) const { return lower_.at(axis); }
  double upper(std::size_t axis) const { return upper_.at(axis); }
  double spacing(std::size_t axis) const { return spacing_.at(axis); }
  const std::vector<double>& spacings() const { return spacing_; }

  std::vector<std::size_t> multi_index(std::size_t point) const;
  std::size_t point_index(std::span<const std::size_t> multi) const;

  double coordinate(std::size_t point, std::size_t axis) const;
  Eigen::VectorXd coordinates(std::size_t point) const;

  /// All grid points as rows of a size() x dims() matrix.
  Eigen::MatrixXd points() const;

  /// Rows of points() selected by index.
  Eigen::MatrixXd points(std::span<const std::size_t> indices) const;

  /// Grid neighbours of `point` along `axis` (lower neighbour first).
  std::vector<std::size_t> vicinity(std::size_t point, std::size_t axis) const;

  /// Neighbour one step up along `axis`, or size() when on the upper face.
  std::size_t upper_neighbor(std::size_t point, std::size_t axis) const;

 private:
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  void check_point(std::size_t point) const;

  std::size_t dims_;
  std::size_t resolution_;
  std::size_t size_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
};

/// Validating factory; same contract as the constructor.
GridDomain build_grid(std::size_t dims, std::size_t resolution, std::vector<double> lower,
                      std::vector<double> upper);

/// Finite-difference operator along one axis.
///
/// Row e corresponds to the directed edge (lower_point(e), upper_point(e)) and
/// holds -1/d at the lower point and +1/d at the upper point, d = spacing.
/// Rows are ordered by lower point index.
struct IncidenceMatrix {
  std::size_t axis = 0;
  double spacing = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  // Edge row whose lower endpoint is the given point; -1 on the upper face.
  std::vector<std::ptrdiff_t> row_by_lower;

  std::size_t rows() const { return edges.size(); }

  /// Row of the edge joining two axis-adjacent points, in either order.
  std::size_t edge_between(std::size_t a, std::size_t b) const;
};

/// Incidence matrix for a zero-based axis.
IncidenceMatrix incidence(const GridDomain& grid, std::size_t axis);

std::vector<IncidenceMatrix> all_incidences(const GridDomain& grid);

/// Worst-case optimality loss from discretizing a Lipschitz function:
/// (spacing * sqrt(n) / 2) * L.  Requires equal spacing on every axis.
double discretization_gap_bound(const GridDomain& grid, double lipschitz);

}  // namespace safeslope
