#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace safeslope {

/// Outcome of one oracle or property battery.
struct OracleReport {
  std::string name;
  std::size_t instances = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  std::optional<std::uint64_t> failing_seed;  // first instance that broke the tolerance
};

/// Workload of each battery.  The defaults match the acceptance thresholds.
struct OracleSizes {
  std::size_t instances = 100;         // random instances for the conditioning checks
  std::size_t coverage_samples = 500;  // prior draws for the confidence-bound coverage check
  std::size_t nested_runs = 5;         // seeded benchmark runs for the set/bound monotonicity checks
  std::size_t run_iterations = 150;    // iterations per benchmark run
};

/// Runs every battery and returns one report each, in a fixed order:
///   gp_dense_conditioning, grid_conditioning, mf_dense_conditioning,
///   ar1_conditional_covariance, greedy_allocation, nested_safe_sets,
///   slope_bound_monotone, ucb_coverage_f, ucb_coverage_slopes, width_shrinkage.
std::vector<OracleReport> run_oracles(std::uint64_t seed, const OracleSizes& sizes = {});

// Individual batteries, each deterministic in `seed`.
OracleReport check_gp_conditioning(std::uint64_t seed, std::size_t instances);
OracleReport check_grid_conditioning(std::uint64_t seed, std::size_t instances);
OracleReport check_mf_conditioning(std::uint64_t seed, std::size_t instances);
OracleReport check_ar1_conditional_covariance(std::uint64_t seed, std::size_t instances);
OracleReport check_greedy_allocation(std::uint64_t seed);
/// Nested-mode benchmark runs; returns {nested_safe_sets, slope_bound_monotone}.
std::vector<OracleReport> check_nested_runs(std::uint64_t seed, std::size_t runs, std::size_t iterations);
/// Returns {ucb_coverage_f, ucb_coverage_slopes}.
std::vector<OracleReport> check_ucb_coverage(std::uint64_t seed, std::size_t samples);
OracleReport check_width_shrinkage(std::uint64_t seed);

void print_reports(std::ostream& out, const std::vector<OracleReport>& reports);

}  // namespace safeslope
