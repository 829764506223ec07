#include "safeslope/lqr.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace safeslope {

void LtiSystem::validate() const {
  if (a.rows() == 0 || a.rows() != a.cols()) throw std::invalid_argument("lti: A must be square and nonempty");
  if (b.rows() != a.rows() || b.cols() == 0) throw std::invalid_argument("lti: B must have one row per state");
}

namespace {

bool symmetric(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

void CostSpec::validate() const {
  if (q.rows() != q.cols() || r.rows() != r.cols()) throw std::invalid_argument("cost: Q and R must be square");
  if (!symmetric(q) || !symmetric(r)) throw std::invalid_argument("cost: Q and R must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(q, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> re(r, Eigen::EigenvaluesOnly);
  if (qe.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("cost: Q must be positive semidefinite");
  if (re.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("cost: R must be positive definite");
  if (horizon == 0) throw std::invalid_argument("cost: horizon must be positive");
  if (z0.size() != q.rows()) throw std::invalid_argument("cost: z0 must have one entry per state");
}

double lqr_cost(const LtiSystem& system, const Eigen::Ref<const Eigen::MatrixXd>& gain, const CostSpec& cost) {
  system.validate();
  cost.validate();
  if (gain.rows() != system.inputs() || gain.cols() != system.states())
    throw std::invalid_argument("lqr cost: gain must be inputs x states");
  if (cost.q.rows() != system.states() || cost.r.rows() != system.inputs())
    throw std::invalid_argument("lqr cost: Q/R do not match the system");

  const Eigen::MatrixXd closed = system.a - system.b * gain;
  const Eigen::MatrixXd stage = cost.q + gain.transpose() * cost.r * gain;
  Eigen::VectorXd z = cost.z0;
  double total = 0.0;
  for (std::size_t j = 0; j < cost.horizon; ++j) {
    total += z.dot(stage * z);
    z = closed * z;
  }
  return total;
}

CostSurfaces log_cost_objectives(const LtiSystem& truth, const LtiSystem& approx, const CostSpec& cost,
                                 const GridDomain& grid) {
  truth.validate();
  approx.validate();
  if (truth.inputs() != 1 || approx.inputs() != 1 || truth.states() != approx.states() ||
      static_cast<Eigen::Index>(grid.dims()) != truth.states())
    throw std::invalid_argument("log cost: grid axes must map onto a single-input gain row");

  CostSurfaces out;
  const auto n = static_cast<Eigen::Index>(grid.size());
  out.f.resize(n);
  out.f_low.resize(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const Eigen::MatrixXd gain = grid.coordinates(static_cast<std::size_t>(p)).transpose();
    const double j_true = lqr_cost(truth, gain, cost);
    const double j_low = lqr_cost(approx, gain, cost);
    if (!(j_true > 0.0) || !(j_low > 0.0))
      throw std::domain_error("log cost: cost is zero (is z0 zero?), log undefined");
    out.f[p] = std::log(j_true);
    out.f_low[p] = std::log(j_low);
  }
  return out;
}

Eigen::VectorXd default_initial_state() { return Eigen::Vector2d(0.3, 0.0); }

BenchmarkInstance benchmark_instance() {
  Eigen::MatrixXd a(2, 2), b(2, 1), a_hat(2, 2), b_hat(2, 1);
  a << 0.785, -0.260, -0.260, 0.315;
  b << 1.475, 0.607;
  a_hat << 0.700, -0.306, -0.306, 0.342;
  b_hat << 1.543, 0.524;

  CostSpec cost;
  cost.q = Eigen::MatrixXd::Identity(2, 2);
  cost.r = Eigen::MatrixXd::Identity(1, 1);
  cost.horizon = 20;
  cost.z0 = default_initial_state();

  return BenchmarkInstance{LtiSystem{a, b},
                       LtiSystem{a_hat, b_hat},
                       cost,
                       GridDomain(2, 26, {-0.5, -3.5}, {4.5, 1.5})};
}

}  // namespace safeslope
