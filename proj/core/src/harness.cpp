#include "safeslope/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "safeslope/analysis.hpp"
#include "safeslope/kernel.hpp"

namespace safeslope {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream used to draw the initial safe sets, kept apart from the trial seeds.
constexpr std::uint64_t kInitialSetStream = 0x5AFE5E75ULL;

const char* bool_text(bool v) { return v ? "1" : "0"; }

void write_coordinates(std::ostream& out, const GridDomain& grid, std::size_t point) {
  const Eigen::VectorXd x = grid.coordinates(point);
  for (Eigen::Index i = 0; i < x.size(); ++i) out << "," << format_double(x[i]);
}

void write_coordinate_header(std::ostream& out, const GridDomain& grid) {
  for (std::size_t i = 0; i < grid.dims(); ++i) out << ",x" << (i + 1);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ProblemSetup build_problem(const ExperimentConfig& config) {
  config.validate();
  const std::size_t dims = config.grid_lower.size();
  GridDomain grid(dims, config.grid_resolution, config.grid_lower, config.grid_upper);
  CostSurfaces surfaces = log_cost_objectives(config.truth, config.approx, config.cost, grid);
  Eigen::Index argmin = 0;
  const double f_star = surfaces.f.minCoeff(&argmin);
  return ProblemSetup{std::move(grid), std::move(surfaces), f_star, static_cast<std::size_t>(argmin)};
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1));
}

std::vector<std::vector<std::size_t>> generate_initial_safe_sets(const GridDomain& grid,
                                                                 const Eigen::Ref<const Eigen::VectorXd>& f,
                                                                 double h, std::size_t k, std::size_t trials,
                                                                 std::uint64_t seed) {
  if (f.size() != static_cast<Eigen::Index>(grid.size()))
    throw std::invalid_argument("initial sets: objective does not cover the grid");
  if (k == 0) throw std::invalid_argument("initial sets: k must be >= 1");
  std::vector<std::size_t> safe;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (f[static_cast<Eigen::Index>(p)] <= h) safe.push_back(p);
  if (safe.size() < k)
    throw std::invalid_argument("initial sets: only " + std::to_string(safe.size()) +
                                " grid points satisfy f <= h, need " + std::to_string(k));

  std::mt19937_64 rng(splitmix64(seed ^ kInitialSetStream));
  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Partial Fisher-Yates shuffle: the first k entries are a uniform k-subset.
    std::vector<std::size_t> pool = safe;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<std::size_t> set(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(set.begin(), set.end());
    for (std::size_t p : set)
      if (!(f[static_cast<Eigen::Index>(p)] <= h)) throw std::logic_error("initial sets: drew an unsafe point");
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<std::vector<std::size_t>> initial_sets_for(const ExperimentConfig& config,
                                                       const ProblemSetup& setup) {
  if (config.initial_policy == InitialSetPolicy::RandomSafe)
    return generate_initial_safe_sets(setup.grid, setup.surfaces.f, config.h, config.initial_set_size,
                                      config.trials, config.seed);

  Eigen::Index best = 0;
  setup.surfaces.f_low.minCoeff(&best);
  if (!(setup.surfaces.f[best] <= config.h))
    throw std::invalid_argument("initial sets: the low-fidelity minimizer is not safe on the true system");
  return std::vector<std::vector<std::size_t>>(config.trials, {static_cast<std::size_t>(best)});
}

SurrogateModel make_model(const ExperimentConfig& config) {
  if (config.fidelity == Fidelity::Single) return SingleFidelityModel{config.kernel, config.noise_variance};
  Ar1Model model;
  model.low_kernel = config.low_kernel;
  model.error_kernel = config.error_kernel;
  model.rho = config.rho;
  model.low_noise = config.low_noise_variance;
  model.high_noise = config.noise_variance;
  model.validate();
  return model;
}

SearchSettings make_settings(const ExperimentConfig& config) {
  SearchSettings s;
  s.algorithm = config.algorithm;
  s.mode = config.mode;
  s.h = config.h;
  s.delta_f = config.delta_f;
  s.delta_m = config.delta_m;
  s.budget = config.iterations;
  return s;
}

std::vector<AggregateRow> aggregate_trials(const std::vector<TrialRecord>& trials, double f_star,
                                           std::size_t iterations) {
  const std::size_t n = trials.size();
  std::vector<std::vector<double>> regret(n), unsafe(n);
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0, u = 0.0;
    const auto& rows = trials[k].rows;
    for (std::size_t t = 0; t < iterations; ++t) {
      if (t < rows.size()) {
        r += rows[t].f - f_star;
        u += rows[t].safe ? 0.0 : 1.0;
      }
      regret[k].push_back(r);
      unsafe[k].push_back(u);
    }
  }

  auto moments = [n](const std::vector<std::vector<double>>& series, std::size_t t) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += series[k][t];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) ss += (series[k][t] - mean) * (series[k][t] - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    return std::pair{mean, sd};
  };

  std::vector<AggregateRow> out;
  if (n == 0) return out;
  out.reserve(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    const auto [rm, rs] = moments(regret, t);
    const auto [um, us] = moments(unsafe, t);
    out.push_back(AggregateRow{t + 1, rm, rs, um, us});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result{config, build_problem(config), {}, {}};
  const ProblemSetup& setup = result.setup;
  const auto sets = initial_sets_for(config, setup);
  const SurrogateModel model = make_model(config);
  const SearchSettings settings = make_settings(config);
  const Objective objective{setup.surfaces.f, setup.surfaces.f_low};

  result.trials.reserve(config.trials);
  for (std::size_t k = 0; k < config.trials; ++k)
    result.trials.push_back(
        run_search(setup.grid, model, objective, sets[k], settings, trial_seed(config.seed, k)));
  result.aggregate = aggregate_trials(result.trials, setup.f_star, config.iterations);
  return result;
}

void write_trial_csv(std::ostream& out, const TrialRecord& trial, const GridDomain& grid, double f_star) {
  out << "t,point";
  write_coordinate_header(out, grid);
  out << ",f,y,safe,safe_set_size,incumbent,f_incumbent,cumulative_regret,cumulative_unsafe\n";
  double regret = 0.0;
  std::size_t unsafe = 0;
  for (const IterationRow& row : trial.rows) {
    regret += row.f - f_star;
    unsafe += row.safe ? 0 : 1;
    out << row.t << "," << row.point;
    write_coordinates(out, grid, row.point);
    out << "," << format_double(row.f) << "," << format_double(row.y) << "," << bool_text(row.safe) << ","
        << row.safe_set_size << "," << row.incumbent << "," << format_double(row.f_incumbent) << ","
        << format_double(regret) << "," << unsafe << "\n";
  }
}

void write_initial_sets_csv(std::ostream& out, const std::vector<TrialRecord>& trials, const GridDomain& grid) {
  out << "trial,seed,point";
  write_coordinate_header(out, grid);
  out << ",f,y\n";
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const TrialRecord& trial = trials[k];
    for (std::size_t j = 0; j < trial.initial_safe.size(); ++j) {
      out << k << "," << trial.seed << "," << trial.initial_safe[j];
      write_coordinates(out, grid, trial.initial_safe[j]);
      out << "," << format_double(trial.initial_f[j]) << "," << format_double(trial.initial_y[j]) << "\n";
    }
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "t,regret_mean,regret_std,unsafe_mean,unsafe_std\n";
  for (const AggregateRow& r : rows)
    out << r.t << "," << format_double(r.regret_mean) << "," << format_double(r.regret_std) << ","
        << format_double(r.unsafe_mean) << "," << format_double(r.unsafe_std) << "\n";
}

void write_surface_csv(std::ostream& out, const GridDomain& grid, const CostSurfaces& surfaces) {
  out << "point";
  write_coordinate_header(out, grid);
  out << ",f,f_low\n";
  for (std::size_t p = 0; p < grid.size(); ++p) {
    out << p;
    write_coordinates(out, grid, p);
    const auto i = static_cast<Eigen::Index>(p);
    out << "," << format_double(surfaces.f[i]) << "," << format_double(surfaces.f_low[i]) << "\n";
  }
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < result.trials.size(); ++k) {
    auto out = open_output(dir / ("trial_" + std::to_string(k) + ".csv"));
    write_trial_csv(out, result.trials[k], result.setup.grid, result.setup.f_star);
  }
  {
    auto out = open_output(dir / "initial_sets.csv");
    write_initial_sets_csv(out, result.trials, result.setup.grid);
  }
  {
    auto out = open_output(dir / "aggregate.csv");
    write_aggregate_csv(out, result.aggregate);
  }
  {
    auto out = open_output(dir / "trials.csv");
    out << "trial,seed,rows,unsafe_count,stop\n";
    for (std::size_t k = 0; k < result.trials.size(); ++k) {
      const TrialRecord& t = result.trials[k];
      out << k << "," << t.seed << "," << t.rows.size() << "," << t.unsafe_count() << "," << to_string(t.stop)
          << "\n";
    }
  }
  {
    auto out = open_output(dir / "config.txt");
    out << format_config(result.config);
  }
}

std::vector<AnalysisEntry> analyze(const ExperimentConfig& config) {
  const ProblemSetup setup = build_problem(config);
  const GridDomain& grid = setup.grid;
  const Eigen::MatrixXd points = grid.points();
  const double noise = config.noise_variance;
  const std::size_t cap = config.max_convergence_time;

  std::vector<AnalysisEntry> out;
  auto add = [&out](std::string name, std::optional<std::size_t> horizon, std::optional<double> value) {
    out.push_back(AnalysisEntry{std::move(name), horizon, value});
  };

  const Eigen::VectorXd eig_single = eigenvalues_descending(covariance_matrix(config.kernel, points));
  const Eigen::VectorXd eig_error = eigenvalues_descending(covariance_matrix(config.error_kernel, points));
  const std::span<const double> lam_single(eig_single.data(), static_cast<std::size_t>(eig_single.size()));
  const std::span<const double> lam_error(eig_error.data(), static_cast<std::size_t>(eig_error.size()));

  const std::vector<double> gamma_single = info_gain_bound_curve(lam_single, noise, cap);
  const std::vector<double> gamma_multi = info_gain_bound_curve(lam_error, noise, cap);

  std::vector<std::size_t> horizons{1, 5, 10, 20, 25, 50, 100, config.iterations};
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  for (std::size_t t : horizons) {
    if (t > cap) continue;
    add("gamma_single", t, gamma_single[t - 1]);
    add("gamma_multi", t, gamma_multi[t - 1]);
  }
  for (std::size_t t : {std::size_t{5}, std::size_t{20}, std::size_t{100}}) {
    const InfoGainBound b = info_gain_bound(lam_error, noise, t);
    for (std::size_t j = 0; j < b.allocation.size(); ++j)
      if (b.allocation[j] > 0)
        add("gamma_multi_allocation_" + std::to_string(t) + "_eig" + std::to_string(j), t,
            static_cast<double>(b.allocation[j]));
  }

  Ar1Model ar1;
  ar1.low_kernel = config.low_kernel;
  ar1.error_kernel = config.error_kernel;
  ar1.rho = config.rho;
  const double c1_single = c1(config.kernel.variance, noise);
  const double c1_multi = c1(ar1.convergence_variance(), noise);
  add("c1_single", std::nullopt, c1_single);
  add("c1_multi", std::nullopt, c1_multi);
  add("c1_multi_prior_variance", std::nullopt, c1(ar1.high_prior_variance(), noise));

  // Closure from the first initial set with the final slope bounds of one SafeSlope run.
  ExperimentConfig probe = config;
  probe.algorithm = Algorithm::SafeSlope;
  const auto sets = initial_sets_for(probe, setup);
  const std::vector<IncidenceMatrix> incidences = all_incidences(grid);
  const TrialRecord trial = run_search(grid, make_model(probe), Objective{setup.surfaces.f, setup.surfaces.f_low},
                                       sets.front(), make_settings(probe), trial_seed(config.seed, 0));
  const std::vector<char> closure = reachability_closure(grid, incidences, setup.surfaces.f,
                                                         trial.final_slope_bounds, sets.front(), config.h, 0.0);
  const auto reach = static_cast<std::size_t>(std::count(closure.begin(), closure.end(), 1));
  add("closure_size", std::nullopt, static_cast<double>(reach));
  add("grid_size", std::nullopt, static_cast<double>(grid.size()));

  const std::size_t n_points = grid.size();
  const double delta_f = config.delta_f;
  const auto beta = [n_points, delta_f](std::size_t t) { return beta_f(t, n_points, delta_f); };
  auto report_time = [&](const std::string& name, const std::vector<double>& gamma, double c1_value,
                         std::size_t cardinality) {
    const auto gamma_fn = [&gamma](std::size_t t) { return gamma[t - 1]; };
    const auto t_star = convergence_time(gamma_fn, beta, c1_value, cardinality, config.epsilon, cap);
    add(name, t_star, t_star ? std::optional<double>(static_cast<double>(*t_star)) : std::nullopt);
  };
  report_time("t_star_single_closure", gamma_single, c1_single, reach);
  report_time("t_star_single_grid", gamma_single, c1_single, n_points);
  report_time("t_star_multi_closure", gamma_multi, c1_multi, reach);
  report_time("t_star_multi_grid", gamma_multi, c1_multi, n_points);
  return out;
}

void write_analysis_csv(std::ostream& out, const std::vector<AnalysisEntry>& entries) {
  out << "quantity,horizon,value\n";
  for (const AnalysisEntry& e : entries) {
    out << e.quantity << ",";
    if (e.horizon) out << *e.horizon;
    out << "," << (e.value ? format_double(*e.value) : std::string("not_found")) << "\n";
  }
}

}  // namespace safeslope
