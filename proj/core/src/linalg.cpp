#include "safeslope/linalg.hpp"

#include <cmath>
#include <string>

namespace safeslope {

namespace {
constexpr double kFirstJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;
}  // namespace

CholeskyFactor jittered_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& matrix, double scale,
                                 bool always_jitter) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("cholesky: matrix must be square");
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

  CholeskyFactor out;
  if (!always_jitter) {
    out.llt.compute(matrix);
    if (out.llt.info() == Eigen::Success) return out;
  }

  Eigen::MatrixXd work = matrix;
  for (double rel = kFirstJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * scale;
    work.diagonal() = matrix.diagonal().array() + jitter;
    out.llt.compute(work);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      return out;
    }
  }
  throw IllConditionedError("covariance matrix is not positive definite after jitter " +
                            std::to_string(kMaxJitter * scale));
}

}  // namespace safeslope
