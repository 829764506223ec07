#include "safeslope/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace safeslope {

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "squared_exponential" || name == "se" || name == "rbf")
    return KernelFamily::SquaredExponential;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::SquaredExponential: return "squared_exponential";
  }
  return "unknown";
}

void KernelSpec::validate() const {
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("kernel: variance must be finite and non-negative");
  if (lengthscales.empty()) throw std::invalid_argument("kernel: at least one lengthscale required");
  for (double l : lengthscales)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("kernel: lengthscales must be positive");
}

double KernelSpec::lengthscale(Eigen::Index axis) const {
  if (lengthscales.size() == 1) return lengthscales.front();
  return lengthscales.at(static_cast<std::size_t>(axis));
}

namespace {

double scaled_distance(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel: input dimension mismatch");
  if (spec.lengthscales.size() != 1 && spec.lengthscales.size() != static_cast<std::size_t>(x.size()))
    throw std::invalid_argument("kernel: lengthscale count does not match input dimension");
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = (x[i] - y[i]) / spec.lengthscale(i);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

double profile(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::Matern32: {
      const double s = std::sqrt(3.0) * r;
      return (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::Matern52: {
      const double s = std::sqrt(5.0) * r;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  return spec.variance * profile(spec.family, scaled_distance(spec, x, y));
}

Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("covariance: input dimension mismatch");
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    const Eigen::VectorXd bj = b.row(j).transpose();
    for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = kernel_eval(spec, a.row(i).transpose(), bj);
  }
  return k;
}

Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a) {
  Eigen::MatrixXd k(a.rows(), a.rows());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const Eigen::VectorXd aj = a.row(j).transpose();
    k(j, j) = spec.variance;
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
      k(i, j) = kernel_eval(spec, a.row(i).transpose(), aj);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::VectorXd eigenvalues_descending(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("eigenvalues: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalues: solver failed");
  Eigen::VectorXd values = solver.eigenvalues();
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

}  // namespace safeslope
