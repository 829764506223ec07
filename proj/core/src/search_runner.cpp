#include "safeslope/search_runner.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace safeslope {

std::string to_string(StopReason reason) {
  return reason == StopReason::BudgetExhausted ? "budget_exhausted" : "no_candidates";
}

std::size_t TrialRecord::unsafe_count() const {
  std::size_t n = 0;
  for (const IterationRow& row : rows) n += row.safe ? 0 : 1;
  return n;
}

GpPosterior grid_prior(const GridDomain& grid, const SurrogateModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& low_observations) {
  const Eigen::MatrixXd points = grid.points();
  if (const auto* single = std::get_if<SingleFidelityModel>(&model)) {
    single->kernel.validate();
    return GpPosterior::from_moments(Eigen::VectorXd::Zero(points.rows()),
                                     covariance_matrix(single->kernel, points));
  }
  const auto& ar1 = std::get<Ar1Model>(model);
  if (low_observations.size() != points.rows())
    throw std::invalid_argument("grid prior: need one low-fidelity observation per grid point");
  MultiFidelityData data;
  data.low_inputs = points;
  data.low_outputs = low_observations;
  data.high_inputs.resize(0, points.cols());
  data.high_outputs.resize(0);
  return mf_posterior(ar1, data, points);
}

TrialRecord run_search(const GridDomain& grid, const SurrogateModel& model, const Objective& objective,
                       std::span<const std::size_t> initial_safe, const SearchSettings& settings,
                       std::uint64_t seed, const SearchObserver& observer) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (objective.truth.size() != n) throw std::invalid_argument("search: objective does not cover the grid");
  if (initial_safe.empty()) throw std::invalid_argument("search: initial safe set must be nonempty");

  const bool multi = std::holds_alternative<Ar1Model>(model);
  const double noise = multi ? std::get<Ar1Model>(model).high_noise
                             : std::get<SingleFidelityModel>(model).noise_variance;
  const double scale = multi ? std::get<Ar1Model>(model).high_prior_variance()
                             : std::get<SingleFidelityModel>(model).kernel.variance;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_sd = std::sqrt(noise);

  Eigen::VectorXd low_obs;
  if (multi) {
    if (objective.low.size() != n) throw std::invalid_argument("search: AR-1 model needs low-fidelity values");
    const double low_sd = std::sqrt(std::get<Ar1Model>(model).low_noise);
    low_obs.resize(n);
    for (Eigen::Index p = 0; p < n; ++p) low_obs[p] = objective.low[p] + low_sd * normal(rng);
  }
  const GpPosterior prior = grid_prior(grid, model, low_obs);
  const std::vector<IncidenceMatrix> incidences = all_incidences(grid);

  TrialRecord record;
  record.seed = seed;
  record.initial_safe.assign(initial_safe.begin(), initial_safe.end());

  SafeSearchState state = make_search_state(grid, incidences, record.initial_safe, settings.h, settings.mode);
  for (std::size_t p : record.initial_safe) {
    const double f = objective.truth[static_cast<Eigen::Index>(p)];
    const double y = f + noise_sd * normal(rng);
    record.initial_f.push_back(f);
    record.initial_y.push_back(y);
    state.sampled.push_back(p);
    state.observations.push_back(y);
  }

  for (std::size_t t = 1; t <= settings.budget; ++t) {
    const Eigen::Map<const Eigen::VectorXd> values(state.observations.data(),
                                                   static_cast<Eigen::Index>(state.observations.size()));
    const GpPosterior post = condition(prior, state.sampled, values, noise, scale);

    StepResult step;
    const double bf = beta_f(t, grid.size(), settings.delta_f);
    if (settings.algorithm == Algorithm::SafeSlope) {
      const SlopeField slopes = slope_field(post, incidences);
      step = safeslope_step(state, grid, incidences, post, slopes, bf,
                            beta_m(t, grid.size(), grid.dims(), settings.delta_m));
    } else {
      step = safeucb_step(state, post, bf);
    }
    if (observer) observer(IterationSnapshot{t, state, post, step});

    if (!step.next) {
      record.stop = StopReason::NoCandidates;
      break;
    }
    const std::size_t x = *step.next;
    IterationRow row;
    row.t = t;
    row.point = x;
    row.f = objective.truth[static_cast<Eigen::Index>(x)];
    row.y = row.f + noise_sd * normal(rng);
    row.safe = row.f <= settings.h;
    row.safe_set_size = state.safe_count();
    row.incumbent = step.incumbent;
    row.f_incumbent = objective.truth[static_cast<Eigen::Index>(step.incumbent)];
    record.rows.push_back(row);

    state.sampled.push_back(x);
    state.observations.push_back(row.y);
  }
  if (settings.algorithm == Algorithm::SafeSlope) record.final_slope_bounds = state.slope_bounds;
  return record;
}

}  // namespace safeslope
