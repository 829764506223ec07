#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "safeslope/kernel.hpp"
#include "safeslope/lqr.hpp"
#include "safeslope/safe_search.hpp"

namespace safeslope {

enum class Fidelity { Single, Multi };
enum class InitialSetPolicy { RandomSafe, ArgminLowFidelity };

Fidelity parse_fidelity(std::string_view name);
std::string to_string(Fidelity fidelity);

/// Everything needed to reproduce one algorithm x fidelity experiment cell.
/// Defaults reproduce the controller-tuning benchmark.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::SafeSlope;
  Fidelity fidelity = Fidelity::Multi;
  BoundMode mode = BoundMode::Unnested;

  KernelSpec kernel;        // single-fidelity GP
  KernelSpec low_kernel;    // AR-1 low fidelity
  KernelSpec error_kernel{KernelFamily::Matern52, 0.01, {2.0}};  // AR-1 error GP
  double rho = 1.0;
  double noise_variance = 1e-4;
  double low_noise_variance = 1e-8;

  double h = 0.0;
  double delta_f = 0.1;
  double delta_m = 0.1;
  std::size_t iterations = 150;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  InitialSetPolicy initial_policy = InitialSetPolicy::RandomSafe;
  std::size_t initial_set_size = 3;

  std::size_t grid_resolution = 26;
  std::vector<double> grid_lower{-0.5, -3.5};
  std::vector<double> grid_upper{4.5, 1.5};

  LtiSystem truth;
  LtiSystem approx;
  CostSpec cost;

  double epsilon = 0.5;
  std::size_t max_convergence_time = 1'000'000;

  void validate() const;
};

ExperimentConfig default_config();

/// Applies one `key = value` setting; throws std::invalid_argument on an
/// unknown key or malformed value.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses a flat `key = value` file (`#` starts a comment) on top of the defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& config);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

}  // namespace safeslope
