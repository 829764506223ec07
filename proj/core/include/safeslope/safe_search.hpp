#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/slope_model.hpp"

namespace safeslope {

enum class Algorithm { SafeSlope, SafeUcb };

/// Nested mode intersects each new confidence interval (and slope bound)
/// with the previous one; unnested mode uses the current interval as is.
enum class BoundMode { Nested, Unnested };

Algorithm parse_algorithm(std::string_view name);
BoundMode parse_bound_mode(std::string_view name);
std::string to_string(Algorithm algorithm);
std::string to_string(BoundMode mode);

/// pi_t = t^2 pi^2 / 6, whose reciprocals sum to one.
double pi_schedule(std::size_t t);

/// 2 log(|X| pi_t / delta_f).
double beta_f(std::size_t t, std::size_t grid_size, double delta_f);

/// 2 log(|X| n pi_t / delta_m).
double beta_m(std::size_t t, std::size_t grid_size, std::size_t dims, double delta_m);

struct ConfidenceState {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  BoundMode mode = BoundMode::Unnested;
};

/// Everything the safe search carries from one iteration to the next.
struct SafeSearchState {
  std::size_t iteration = 0;
  double h = 0.0;
  std::vector<std::size_t> initial_safe;
  std::vector<char> safe;  // membership mask over grid points
  ConfidenceState confidence;
  SlopeBounds slope_bounds;
  std::vector<std::size_t> sampled;
  std::vector<double> observations;

  std::size_t safe_count() const;
  std::vector<std::size_t> safe_set() const;
  bool is_safe(std::size_t point) const { return safe[point] != 0; }
};

/// Fresh state at t = 0: S_0 marked safe, slope bounds infinite.  In nested
/// mode S_0 points start with C_0 = (-inf, h] and all others with C_0 = R.
SafeSearchState make_search_state(const GridDomain& grid, std::span<const IncidenceMatrix> incidences,
                                   std::vector<std::size_t> initial_safe, double h, BoundMode mode);

struct StepResult {
  std::optional<std::size_t> next;  // empty when there is nothing safe to sample
  std::size_t incumbent = 0;        // argmin of the upper bound over S_t
  std::vector<std::size_t> minimizers;
  std::vector<std::size_t> expanders;
  std::vector<std::size_t> newly_safe;
};

/// One SafeSlope iteration.  `posterior` and `slopes` must be built from the
/// data observed before this iteration.
StepResult safeslope_step(SafeSearchState& state, const GridDomain& grid,
                          std::span<const IncidenceMatrix> incidences, const GpPosterior& posterior,
                          const SlopeField& slopes, double beta_f_t, double beta_m_t);

/// One SafeUCB iteration: S_t = {x : u_t(x) <= h}, widest interval wins.
StepResult safeucb_step(SafeSearchState& state, const GpPosterior& posterior, double beta_f_t);

}  // namespace safeslope
