#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "safeslope/grid.hpp"

namespace safeslope {

/// z_{j+1} = A z_j + B u_j.
struct LtiSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  void validate() const;
};

/// Finite-horizon quadratic cost sum_{j<H} z_j^T (Q + K^T R K) z_j.
struct CostSpec {
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
  std::size_t horizon = 20;
  Eigen::VectorXd z0;

  void validate() const;
};

/// Cost of the closed loop u = -K z.  `gain` is inputs x states.
double lqr_cost(const LtiSystem& system, const Eigen::Ref<const Eigen::MatrixXd>& gain, const CostSpec& cost);

/// Grid functions f = log J (true system) and f_L = log J_hat (approximate system),
/// where grid point x is the gain row K = [x_1 ... x_n].
struct CostSurfaces {
  Eigen::VectorXd f;
  Eigen::VectorXd f_low;
};

CostSurfaces log_cost_objectives(const LtiSystem& truth, const LtiSystem& approx, const CostSpec& cost,
                                 const GridDomain& grid);

/// Defaults of the controller-tuning benchmark.
struct BenchmarkInstance {
  LtiSystem truth;
  LtiSystem approx;
  CostSpec cost;
  GridDomain grid;
  double h = 0.0;
  double delta_f = 0.1;
  double delta_m = 0.1;
  double noise_variance = 1e-4;
  double low_noise_variance = 1e-8;
  std::size_t iterations = 150;
  std::size_t trials = 10;
  std::size_t initial_set_size = 3;
};

/// The true 2-state plant and its identified approximation, Q = I, R = 1,
/// H = 20, gains on [-0.5, 4.5] x [-3.5, 1.5] at 26 points per axis.
BenchmarkInstance benchmark_instance();

/// Default initial state (0.3, 0).  See README: the cost includes z0^T Q z0,
/// so any |z0| >= 1 makes f = log J positive everywhere.
Eigen::VectorXd default_initial_state();

}  // namespace safeslope
