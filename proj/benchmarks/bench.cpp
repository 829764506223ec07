#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "safeslope/analysis.hpp"
#include "safeslope/config.hpp"
#include "safeslope/harness.hpp"
#include "safeslope/lqr.hpp"
#include "safeslope/safe_search.hpp"
#include "safeslope/search_runner.hpp"

using namespace safeslope;

namespace {

const ExperimentConfig& config() {
  static const ExperimentConfig c = default_config();
  return c;
}

const ProblemSetup& setup() {
  static const ProblemSetup s = build_problem(config());
  return s;
}

GpPosterior benchmark_prior() {
  return grid_prior(setup().grid, SingleFidelityModel{config().kernel, config().noise_variance}, Eigen::VectorXd());
}

// t observations spread over the safe region of the benchmark.
std::pair<std::vector<std::size_t>, Eigen::VectorXd> observations(std::size_t t) {
  std::vector<std::size_t> safe;
  for (std::size_t p = 0; p < setup().grid.size(); ++p)
    if (setup().surfaces.f[static_cast<Eigen::Index>(p)] <= 0.0) safe.push_back(p);
  std::vector<std::size_t> obs;
  Eigen::VectorXd y(static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < t; ++i) {
    obs.push_back(safe[(i * 7) % safe.size()]);
    y[static_cast<Eigen::Index>(i)] = setup().surfaces.f[static_cast<Eigen::Index>(obs.back())];
  }
  return {obs, y};
}

}  // namespace

static void BM_GridConditioning(benchmark::State& state) {
  const GpPosterior prior = benchmark_prior();
  const auto [obs, y] = observations(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(condition(prior, obs, y, config().noise_variance, 1.0));
}
BENCHMARK(BM_GridConditioning)->Arg(10)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

static void BM_MultiFidelityGridPrior(benchmark::State& state) {
  const SurrogateModel model = make_model(config());
  for (auto _ : state) benchmark::DoNotOptimize(grid_prior(setup().grid, model, setup().surfaces.f_low));
}
BENCHMARK(BM_MultiFidelityGridPrior)->Unit(benchmark::kMillisecond);

static void BM_SlopeField(benchmark::State& state) {
  const auto [obs, y] = observations(50);
  const GpPosterior post = condition(benchmark_prior(), obs, y, config().noise_variance, 1.0);
  const std::vector<IncidenceMatrix> w = all_incidences(setup().grid);
  for (auto _ : state) benchmark::DoNotOptimize(slope_field(post, w));
}
BENCHMARK(BM_SlopeField)->Unit(benchmark::kMillisecond);

static void BM_SafeSlopeStep(benchmark::State& state) {
  const auto [obs, y] = observations(50);
  const GpPosterior post = condition(benchmark_prior(), obs, y, config().noise_variance, 1.0);
  const std::vector<IncidenceMatrix> w = all_incidences(setup().grid);
  const SlopeField slopes = slope_field(post, w);
  const auto sets = initial_sets_for(config(), setup());
  for (auto _ : state) {
    SafeSearchState s = make_search_state(setup().grid, w, sets[0], 0.0, BoundMode::Unnested);
    benchmark::DoNotOptimize(safeslope_step(s, setup().grid, w, post, slopes, 18.6, 20.0));
  }
}
BENCHMARK(BM_SafeSlopeStep)->Unit(benchmark::kMicrosecond);

static void BM_LqrSurface(benchmark::State& state) {
  const BenchmarkInstance inst = benchmark_instance();
  for (auto _ : state) benchmark::DoNotOptimize(log_cost_objectives(inst.truth, inst.approx, inst.cost, inst.grid));
}
BENCHMARK(BM_LqrSurface)->Unit(benchmark::kMicrosecond);

static void BM_InfoGainCurve(benchmark::State& state) {
  const Eigen::VectorXd lambda = eigenvalues_descending(covariance_matrix(config().error_kernel, setup().grid.points()));
  const std::vector<double> v(lambda.data(), lambda.data() + lambda.size());
  for (auto _ : state)
    benchmark::DoNotOptimize(info_gain_bound_curve(v, config().noise_variance, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_InfoGainCurve)->Arg(150)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_SingleTrial(benchmark::State& state) {
  ExperimentConfig c = config();
  c.iterations = 30;
  const auto sets = initial_sets_for(c, setup());
  for (auto _ : state)
    benchmark::DoNotOptimize(run_search(setup().grid, make_model(c), Objective{setup().surfaces.f, setup().surfaces.f_low},
                                        sets[0], make_settings(c), trial_seed(c.seed, 0)));
}
BENCHMARK(BM_SingleTrial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
