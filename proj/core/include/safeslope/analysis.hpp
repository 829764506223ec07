#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "safeslope/grid.hpp"
#include "safeslope/slope_model.hpp"

namespace safeslope {

/// Upper bound on the maximum information gain after `horizon` evaluations:
///
///   (1/2) / (1 - 1/e) * max_{m_1 + ... + m_T = T} sum_t log(1 + m_t lambda_t / noise)
///
/// Eigenvalues past the T-th, and missing ones when fewer than T are given,
/// are treated as zero.
struct InfoGainBound {
  std::size_t horizon = 0;
  std::vector<double> eigenvalues;
  double noise_variance = 0.0;
  std::vector<std::size_t> allocation;  // length horizon, sums to horizon
  double value = 0.0;
};

/// Greedy unit-by-unit allocation; optimal because each term is concave in m_t.
InfoGainBound info_gain_bound(std::span<const double> eigenvalues, double noise_variance,
                              std::size_t horizon);

/// Bound values for every horizon 1..max_horizon in one incremental pass.
std::vector<double> info_gain_bound_curve(std::span<const double> eigenvalues, double noise_variance,
                                          std::size_t max_horizon);

/// Unscaled objective sum_t log(1 + m_t lambda_t / noise) for a given allocation.
double allocation_objective(std::span<const double> eigenvalues, double noise_variance,
                            std::span<const std::size_t> allocation);

/// 8 v^2 / log(1 + v^2 / noise).
double c1(double variance, double noise_variance);

/// Smallest t in [1, cap] with t / (gamma(t) beta(t)) >= c1 (reach + 1) / eps^2.
std::optional<std::size_t> convergence_time(const std::function<double(std::size_t)>& gamma,
                                            const std::function<double(std::size_t)>& beta,
                                            double c1_value, std::size_t reach_cardinality,
                                            double epsilon, std::size_t cap);

/// Fixpoint of S -> S ∪ {x' in V_i(x), x in S : f(x) + u_i(x, x') d_i + eps <= h}
/// for a fixed snapshot of slope bounds.  Returns a membership mask.
std::vector<char> reachability_closure(const GridDomain& grid, std::span<const IncidenceMatrix> incidences,
                                       const Eigen::Ref<const Eigen::VectorXd>& f, const SlopeBounds& bounds,
                                       std::span<const std::size_t> seed_set, double h, double epsilon);

/// Prefix sums of f(x_t) - f_star.
std::vector<double> cumulative_regret(std::span<const double> sampled_values, double f_star);

}  // namespace safeslope
