#include "safeslope/mfgp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "safeslope/linalg.hpp"

namespace safeslope {

void Ar1Model::validate() const {
  low_kernel.validate();
  error_kernel.validate();
  if (!std::isfinite(rho)) throw std::invalid_argument("ar1: rho must be finite");
  if (!(low_noise >= 0.0) || !(high_noise >= 0.0))
    throw std::invalid_argument("ar1: noise variances must be >= 0");
}

double Ar1Model::high_prior_variance() const {
  return rho * rho * low_kernel.variance + error_kernel.variance;
}

double Ar1Model::convergence_variance() const { return rho * low_kernel.variance + error_kernel.variance; }

Eigen::MatrixXd joint_covariance(const Ar1Model& model, const Eigen::Ref<const Eigen::MatrixXd>& low_x,
                                 const Eigen::Ref<const Eigen::MatrixXd>& high_x) {
  model.validate();
  const Eigen::Index nl = low_x.rows();
  const Eigen::Index nh = high_x.rows();
  if (nh > 0 && low_x.cols() != high_x.cols())
    throw std::invalid_argument("ar1: low and high inputs differ in dimension");

  Eigen::MatrixXd k(nl + nh, nl + nh);
  k.topLeftCorner(nl, nl) = covariance_matrix(model.low_kernel, low_x);
  if (nh == 0) return k;

  const Eigen::MatrixXd cross = model.rho * covariance_matrix(model.low_kernel, low_x, high_x);
  k.topRightCorner(nl, nh) = cross;
  k.bottomLeftCorner(nh, nl) = cross.transpose();
  k.bottomRightCorner(nh, nh) = model.rho * model.rho * covariance_matrix(model.low_kernel, high_x) +
                                covariance_matrix(model.error_kernel, high_x);
  return k;
}

GpPosterior mf_posterior(const Ar1Model& model, const MultiFidelityData& data,
                         const Eigen::Ref<const Eigen::MatrixXd>& queries) {
  model.validate();
  const Eigen::Index nl = data.low_outputs.size();
  const Eigen::Index nh = data.high_outputs.size();
  if (data.low_inputs.rows() != nl || data.high_inputs.rows() != nh)
    throw std::invalid_argument("mf posterior: input and output counts differ");

  const double rho = model.rho;
  Eigen::MatrixXd k_qq = rho * rho * covariance_matrix(model.low_kernel, queries) +
                         covariance_matrix(model.error_kernel, queries);
  if (nl + nh == 0) return GpPosterior::from_moments(Eigen::VectorXd::Zero(queries.rows()), std::move(k_qq));

  Eigen::MatrixXd low_x = data.low_inputs;
  if (nl == 0) low_x.resize(0, queries.cols());
  Eigen::MatrixXd system = joint_covariance(model, low_x, data.high_inputs);
  system.diagonal().head(nl).array() += model.low_noise;
  system.diagonal().tail(nh).array() += model.high_noise;

  Eigen::MatrixXd k_oq(nl + nh, queries.rows());
  if (nl > 0) k_oq.topRows(nl) = rho * covariance_matrix(model.low_kernel, data.low_inputs, queries);
  if (nh > 0)
    k_oq.bottomRows(nh) = rho * rho * covariance_matrix(model.low_kernel, data.high_inputs, queries) +
                          covariance_matrix(model.error_kernel, data.high_inputs, queries);

  Eigen::VectorXd y(nl + nh);
  y << data.low_outputs, data.high_outputs;

  const double scale = std::max(model.low_kernel.variance, model.high_prior_variance());
  const CholeskyFactor factor = jittered_cholesky(system, scale);
  const auto lower = factor.llt.matrixL();
  const Eigen::MatrixXd v = lower.solve(k_oq);
  Eigen::VectorXd mean = v.transpose() * lower.solve(y);
  k_qq.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose(), -1.0);
  Eigen::MatrixXd cov = k_qq.selfadjointView<Eigen::Lower>();
  return GpPosterior::from_moments(std::move(mean), std::move(cov));
}

ConditionalCovarianceCheck conditional_covariance_check(const Ar1Model& model,
                                                        const Eigen::Ref<const Eigen::MatrixXd>& low_x,
                                                        const Eigen::Ref<const Eigen::MatrixXd>& high_x) {
  model.validate();
  if (model.low_noise != 0.0)
    throw std::invalid_argument("conditional covariance check: low fidelity must be noise-free");
  if (low_x.rows() == 0) throw std::invalid_argument("conditional covariance check: empty low inputs");
  if (high_x.cols() != low_x.cols())
    throw std::invalid_argument("conditional covariance check: input dimension mismatch");
  for (Eigen::Index i = 0; i < low_x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < low_x.rows(); ++j)
      if (low_x.row(i) == low_x.row(j))
        throw std::invalid_argument("conditional covariance check: low inputs must be distinct");
  for (Eigen::Index h = 0; h < high_x.rows(); ++h) {
    bool found = false;
    for (Eigen::Index i = 0; i < low_x.rows() && !found; ++i) found = high_x.row(h) == low_x.row(i);
    if (!found)
      throw std::invalid_argument("conditional covariance check: high inputs must be a subset of low inputs");
  }

  const Eigen::Index nl = low_x.rows();
  const Eigen::Index nh = high_x.rows();
  const Eigen::MatrixXd joint = joint_covariance(model, low_x, high_x);
  const CholeskyFactor factor = jittered_cholesky(joint.topLeftCorner(nl, nl), model.low_kernel.variance);
  const Eigen::MatrixXd solved = factor.llt.solve(joint.topRightCorner(nl, nh));

  ConditionalCovarianceCheck out;
  out.conditional = joint.bottomRightCorner(nh, nh) - joint.bottomLeftCorner(nh, nl) * solved;
  out.max_deviation =
      nh == 0 ? 0.0 : (out.conditional - covariance_matrix(model.error_kernel, high_x)).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace safeslope
