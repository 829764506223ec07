#pragma once

#include <Eigen/Core>

#include "safeslope/gp.hpp"
#include "safeslope/kernel.hpp"

namespace safeslope {

/// Two-level linear auto-regressive model f(x) = rho * f_L(x) + delta(x),
/// with f_L and delta independent zero-mean GPs.
///
/// Deeper chains f_p = rho_p * f_{p-1} + delta_p are not modelled here; only
/// the highest-level error kernel would enter the conditional covariance.
struct Ar1Model {
  KernelSpec low_kernel;
  KernelSpec error_kernel;
  double rho = 1.0;
  double low_noise = 1e-8;
  double high_noise = 1e-4;

  void validate() const;

  /// Prior variance of f at any point: rho^2 v_L^2 + v_delta^2.
  double high_prior_variance() const;

  /// rho v_L^2 + v_delta^2, the variance as written in the AR-1 convergence
  /// result; differs from high_prior_variance() unless rho is 0 or 1.
  double convergence_variance() const;
};

/// Covariance of [f_L(X_L); f(X_H)] without observation noise.
Eigen::MatrixXd joint_covariance(const Ar1Model& model, const Eigen::Ref<const Eigen::MatrixXd>& low_x,
                                 const Eigen::Ref<const Eigen::MatrixXd>& high_x);

struct MultiFidelityData {
  Eigen::MatrixXd low_inputs;
  Eigen::VectorXd low_outputs;
  Eigen::MatrixXd high_inputs;
  Eigen::VectorXd high_outputs;
};

/// Posterior of the high-fidelity f at `queries` given both datasets, with
/// the model's per-fidelity noise on the diagonal blocks.
GpPosterior mf_posterior(const Ar1Model& model, const MultiFidelityData& data,
                         const Eigen::Ref<const Eigen::MatrixXd>& queries);

struct ConditionalCovarianceCheck {
  Eigen::MatrixXd conditional;  // cov(f(X_H) | f_L(X_L))
  double max_deviation = 0.0;   // max |conditional - k_delta(X_H, X_H)|
};

/// Brute-force conditional covariance of f(X_H) given noise-free f_L(X_L).
///
/// Requires model.low_noise == 0, distinct rows in X_L and every row of X_H
/// present in X_L.  The result should equal the error kernel on X_H.
ConditionalCovarianceCheck conditional_covariance_check(const Ar1Model& model,
                                                        const Eigen::Ref<const Eigen::MatrixXd>& low_x,
                                                        const Eigen::Ref<const Eigen::MatrixXd>& high_x);

}  // namespace safeslope
