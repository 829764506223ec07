#pragma once

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace safeslope {

/// Raised when a covariance system stays indefinite after maximum jitter.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CholeskyFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

/// Cholesky factorization with diagonal jitter escalation.
///
/// The first attempt uses no jitter unless `always_jitter` is set; after a
/// failure jitter starts at 1e-10 * scale and grows by 10x up to 1e-4 * scale.
CholeskyFactor jittered_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& matrix, double scale,
                                 bool always_jitter = false);

}  // namespace safeslope
