// safeslope: run safe-optimization experiments on the LQR benchmark.
//
//   safeslope run --config benchmark.cfg --out results/
//   safeslope surface [--config benchmark.cfg] [--out surface.csv]
//   safeslope analyze [--config benchmark.cfg] [--out analysis.csv]
//   safeslope verify [--seed 1]

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "safeslope/config.hpp"
#include "safeslope/harness.hpp"
#include "safeslope/verification.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> iterations;
  std::optional<std::string> algorithm;
  std::optional<std::string> fidelity;
  std::optional<std::string> mode;
};

void add_config_options(CLI::App* app, Overrides& o) {
  app->add_option("--config,-c", o.config_path, "Config file (key = value); defaults to the benchmark instance")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
  app->add_option("--iters", o.iterations, "Iterations per trial")->check(CLI::PositiveNumber);
  app->add_option("--algorithm", o.algorithm, "safeslope | safeucb");
  app->add_option("--fidelity", o.fidelity, "single | multi");
  app->add_option("--mode", o.mode, "nested | unnested");
}

safeslope::ExperimentConfig resolve(const Overrides& o) {
  safeslope::ExperimentConfig c =
      o.config_path.empty() ? safeslope::default_config() : safeslope::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.iterations) c.iterations = *o.iterations;
  if (o.algorithm) c.algorithm = safeslope::parse_algorithm(*o.algorithm);
  if (o.fidelity) c.fidelity = safeslope::parse_fidelity(*o.fidelity);
  if (o.mode) c.mode = safeslope::parse_bound_mode(*o.mode);
  c.validate();
  return c;
}

// Writes to `path`, or to stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

int run_command(const Overrides& o, const std::string& out_dir) {
  const safeslope::ExperimentConfig config = resolve(o);
  const safeslope::ExperimentResult result = safeslope::run_experiment(config);
  safeslope::write_outputs(result, out_dir);
  const auto& last = result.aggregate.back();
  std::printf("%s %s %s: %zu trials x %zu iterations -> %s\n", safeslope::to_string(config.algorithm).c_str(),
              safeslope::to_string(config.fidelity).c_str(), safeslope::to_string(config.mode).c_str(),
              config.trials, config.iterations, out_dir.c_str());
  std::printf("final cumulative regret %.6g +/- %.6g, unsafe samples %.6g +/- %.6g\n", last.regret_mean,
              last.regret_std, last.unsafe_mean, last.unsafe_std);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe Bayesian optimization with slope Gaussian processes"};
  app.require_subcommand(1);

  Overrides run_opts, surface_opts, analyze_opts;
  std::string run_out, surface_out, analyze_out;

  CLI::App* run = app.add_subcommand("run", "Run every trial of one algorithm x fidelity cell");
  add_config_options(run, run_opts);
  run->add_option("--out,-o", run_out, "Output directory")->required();

  CLI::App* surface = app.add_subcommand("surface", "Write the f / f_low cost surfaces as CSV");
  add_config_options(surface, surface_opts);
  surface->add_option("--out,-o", surface_out, "Output file (default: stdout)");

  CLI::App* analyze = app.add_subcommand("analyze", "Information-gain bounds, C1 and convergence times");
  add_config_options(analyze, analyze_opts);
  analyze->add_option("--out,-o", analyze_out, "Output file (default: stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Run the oracle and property batteries");
  std::uint64_t verify_seed = 1;
  safeslope::OracleSizes sizes;
  verify->add_option("--seed", verify_seed, "Seed for every battery");
  verify->add_option("--instances", sizes.instances, "Random instances per conditioning check");
  verify->add_option("--samples", sizes.coverage_samples, "Prior draws for the coverage check");
  verify->add_option("--runs", sizes.nested_runs, "Benchmark runs for the monotonicity checks");
  verify->add_option("--iters", sizes.run_iterations, "Iterations per benchmark run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_opts, run_out);
    if (*surface) {
      const safeslope::ProblemSetup setup = safeslope::build_problem(resolve(surface_opts));
      emit(surface_out, [&](std::ostream& out) { safeslope::write_surface_csv(out, setup.grid, setup.surfaces); });
      return 0;
    }
    if (*analyze) {
      const auto entries = safeslope::analyze(resolve(analyze_opts));
      emit(analyze_out, [&](std::ostream& out) { safeslope::write_analysis_csv(out, entries); });
      return 0;
    }
    if (*verify) {
      const auto reports = safeslope::run_oracles(verify_seed, sizes);
      safeslope::print_reports(std::cout, reports);
      for (const auto& r : reports)
        if (!r.passed) return 1;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "safeslope: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
