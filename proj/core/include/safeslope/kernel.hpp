#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace safeslope {

enum class KernelFamily { Matern32, Matern52, SquaredExponential };

KernelFamily parse_kernel_family(std::string_view name);
std::string to_string(KernelFamily family);

/// Stationary kernel with per-axis lengthscales.
///
/// A single lengthscale is broadcast to every input dimension.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  double variance = 1.0;
  std::vector<double> lengthscales{1.0};

  void validate() const;
  double lengthscale(Eigen::Index axis) const;
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// Cross-covariance between the rows of `a` and the rows of `b`.
Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b);

Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Eigenvalues of a symmetric matrix, largest first.
Eigen::VectorXd eigenvalues_descending(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

}  // namespace safeslope
