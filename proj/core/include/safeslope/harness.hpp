#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "safeslope/config.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/lqr.hpp"
#include "safeslope/search_runner.hpp"

namespace safeslope {

/// Grid and ground-truth cost surfaces for a config.
struct ProblemSetup {
  GridDomain grid;
  CostSurfaces surfaces;
  double f_star = 0.0;  // grid minimum of the true objective
  std::size_t argmin = 0;
};

ProblemSetup build_problem(const ExperimentConfig& config);

/// Per-trial seed: splitmix64(master + 0x9E3779B97F4A7C15 * (trial + 1)).
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// `trials` sets of `k` distinct points with f <= h, drawn uniformly.
std::vector<std::vector<std::size_t>> generate_initial_safe_sets(const GridDomain& grid,
                                                                 const Eigen::Ref<const Eigen::VectorXd>& f,
                                                                 double h, std::size_t k, std::size_t trials,
                                                                 std::uint64_t seed);

/// Initial safe sets for every trial according to the config's policy.  The
/// sets depend only on the ground truth, h and the master seed, so every
/// algorithm x fidelity cell run with the same seed shares them.
std::vector<std::vector<std::size_t>> initial_sets_for(const ExperimentConfig& config,
                                                       const ProblemSetup& setup);

SurrogateModel make_model(const ExperimentConfig& config);
SearchSettings make_settings(const ExperimentConfig& config);

struct AggregateRow {
  std::size_t t = 0;
  double regret_mean = 0.0;
  double regret_std = 0.0;
  double unsafe_mean = 0.0;
  double unsafe_std = 0.0;
};

/// Mean and sample standard deviation across trials of the cumulative regret
/// and cumulative unsafe count at t = 1..iterations.  A trial that stopped
/// early keeps its last cumulative values.
std::vector<AggregateRow> aggregate_trials(const std::vector<TrialRecord>& trials, double f_star,
                                           std::size_t iterations);

struct ExperimentResult {
  ExperimentConfig config;
  ProblemSetup setup;
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> aggregate;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

void write_trial_csv(std::ostream& out, const TrialRecord& trial, const GridDomain& grid, double f_star);
void write_initial_sets_csv(std::ostream& out, const std::vector<TrialRecord>& trials, const GridDomain& grid);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_surface_csv(std::ostream& out, const GridDomain& grid, const CostSurfaces& surfaces);

/// Writes trial_<k>.csv, initial_sets.csv, aggregate.csv and config.txt into `dir`.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

struct AnalysisEntry {
  std::string quantity;
  std::optional<std::size_t> horizon;
  std::optional<double> value;  // empty: not found within the scan cap
};

/// Information-gain bounds, C1 constants, reachability closure size and
/// convergence-time estimates for a config.  The closure uses the slope
/// bounds left at the end of one SafeSlope run from the first initial set.
std::vector<AnalysisEntry> analyze(const ExperimentConfig& config);

void write_analysis_csv(std::ostream& out, const std::vector<AnalysisEntry>& entries);

}  // namespace safeslope
