#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/kernel.hpp"
#include "safeslope/mfgp.hpp"
#include "safeslope/safe_search.hpp"

namespace safeslope {

struct SingleFidelityModel {
  KernelSpec kernel;
  double noise_variance = 1e-4;
};

using SurrogateModel = std::variant<SingleFidelityModel, Ar1Model>;

/// Ground truth the search queries.  `low` is only read by AR-1 models.
struct Objective {
  Eigen::VectorXd truth;
  Eigen::VectorXd low;
};

struct SearchSettings {
  Algorithm algorithm = Algorithm::SafeSlope;
  BoundMode mode = BoundMode::Unnested;
  double h = 0.0;
  double delta_f = 0.1;
  double delta_m = 0.1;
  std::size_t budget = 150;
};

struct IterationRow {
  std::size_t t = 0;
  std::size_t point = 0;
  double f = 0.0;  // noise-free objective at the sampled point
  double y = 0.0;  // observation handed to the model
  bool safe = true;
  std::size_t safe_set_size = 0;
  std::size_t incumbent = 0;
  double f_incumbent = 0.0;
};

enum class StopReason { BudgetExhausted, NoCandidates };

std::string to_string(StopReason reason);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::vector<std::size_t> initial_safe;
  std::vector<double> initial_f;
  std::vector<double> initial_y;
  std::vector<IterationRow> rows;
  StopReason stop = StopReason::BudgetExhausted;
  SlopeBounds final_slope_bounds;  // empty for SafeUCB

  std::size_t unsafe_count() const;
};

/// Read-only view handed to an observer after every iteration.
struct IterationSnapshot {
  std::size_t t;
  const SafeSearchState& state;
  const GpPosterior& posterior;
  const StepResult& step;
};

using SearchObserver = std::function<void(const IterationSnapshot&)>;

/// Gaussian over the grid before any high-fidelity observation: the GP prior
/// for a single-fidelity model, or f given noisy f_L over the whole grid for
/// an AR-1 model.
GpPosterior grid_prior(const GridDomain& grid, const SurrogateModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& low_observations);

/// Runs one seeded search from `initial_safe`.
///
/// AR-1 models first observe f_L at every grid point.  The S_0 points are
/// then observed on the high fidelity before iteration 1.  Observation noise
/// comes from the trial RNG seeded with `seed`.
TrialRecord run_search(const GridDomain& grid, const SurrogateModel& model, const Objective& objective,
                       std::span<const std::size_t> initial_safe, const SearchSettings& settings,
                       std::uint64_t seed, const SearchObserver& observer = {});

}  // namespace safeslope
