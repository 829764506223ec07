#include "safeslope/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "safeslope/analysis.hpp"
#include "safeslope/config.hpp"
#include "safeslope/gp.hpp"
#include "safeslope/grid.hpp"
#include "safeslope/harness.hpp"
#include "safeslope/kernel.hpp"
#include "safeslope/mfgp.hpp"
#include "safeslope/safe_search.hpp"
#include "safeslope/search_runner.hpp"
#include "safeslope/slope_model.hpp"

namespace safeslope {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

KernelSpec random_kernel(Rng& rng, std::size_t dims, double ls_lo, double ls_hi) {
  static constexpr KernelFamily families[] = {KernelFamily::Matern32, KernelFamily::Matern52,
                                              KernelFamily::SquaredExponential};
  KernelSpec spec;
  spec.family = families[uniform_int(rng, 0, 2)];
  spec.variance = uniform(rng, 0.5, 2.0);
  spec.lengthscales.clear();
  for (std::size_t i = 0; i < dims; ++i) spec.lengthscales.push_back(uniform(rng, ls_lo, ls_hi));
  return spec;
}

Eigen::MatrixXd random_points(Rng& rng, std::size_t n, std::size_t dims) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = uniform(rng, 0.0, 1.0);
  return x;
}

Eigen::VectorXd random_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

// Textbook Gaussian conditioning with an explicit inverse.
struct DenseMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

DenseMoments dense_condition(const Eigen::MatrixXd& k_qq, const Eigen::MatrixXd& k_qo, const Eigen::MatrixXd& k_oo,
                             const Eigen::VectorXd& y, const Eigen::VectorXd& noise_diag) {
  Eigen::MatrixXd gram = k_oo;
  gram.diagonal() += noise_diag;
  const Eigen::MatrixXd inv = gram.inverse();
  return DenseMoments{k_qo * inv * y, k_qq - k_qo * inv * k_qo.transpose()};
}

double relative_deviation(const GpPosterior& got, const DenseMoments& want, double variance) {
  const double mean_scale = std::max(1.0, want.mean.cwiseAbs().maxCoeff());
  const double mean_dev = (got.mean - want.mean).cwiseAbs().maxCoeff() / mean_scale;
  const double cov_dev = (got.covariance - want.covariance).cwiseAbs().maxCoeff() / variance;
  return std::max(mean_dev, cov_dev);
}

// Accumulates per-instance deviations into a report.
class Tally {
 public:
  Tally(std::string name, double tolerance) { report_.name = std::move(name), report_.tolerance = tolerance; }

  void record(double deviation, std::uint64_t seed) {
    ++report_.instances;
    if (std::isnan(deviation)) deviation = std::numeric_limits<double>::infinity();
    report_.max_deviation = std::max(report_.max_deviation, deviation);
    if (deviation > report_.tolerance && report_.passed) {
      report_.passed = false;
      report_.failing_seed = seed;
    }
  }

  OracleReport report() const { return report_; }

 private:
  OracleReport report_;
};

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t battery, std::size_t instance) {
  return trial_seed(seed ^ (battery * 0xD1B54A32D192ED03ULL), instance);
}

}  // namespace

OracleReport check_gp_conditioning(std::uint64_t seed, std::size_t instances) {
  Tally tally("gp_dense_conditioning", 1e-8);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = instance_seed(seed, 1, i);
    Rng rng(s);
    const std::size_t dims = uniform_int(rng, 1, 3);
    const std::size_t n_obs = uniform_int(rng, 1, 15);
    const std::size_t n_query = uniform_int(rng, 1, 15);
    const KernelSpec spec = random_kernel(rng, dims, 0.2, 1.5);
    const double noise = spec.variance * std::pow(10.0, uniform(rng, -3.0, -1.0));

    GpDataset data{random_points(rng, n_obs, dims), random_vector(rng, n_obs), noise};
    const Eigen::MatrixXd queries = random_points(rng, n_query, dims);
    const GpPosterior got = posterior(spec, data, queries);
    const DenseMoments want =
        dense_condition(covariance_matrix(spec, queries), covariance_matrix(spec, queries, data.inputs),
                        covariance_matrix(spec, data.inputs), data.outputs,
                        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_obs), noise));
    tally.record(relative_deviation(got, want, spec.variance), s);
  }
  return tally.report();
}

OracleReport check_grid_conditioning(std::uint64_t seed, std::size_t instances) {
  Tally tally("grid_conditioning", 1e-8);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = instance_seed(seed, 2, i);
    Rng rng(s);
    const std::size_t dims = uniform_int(rng, 1, 2);
    const std::size_t resolution = dims == 1 ? uniform_int(rng, 3, 30) : uniform_int(rng, 3, 5);
    const GridDomain grid(dims, resolution, std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0));
    const KernelSpec spec = random_kernel(rng, dims, 0.2, 1.5);
    const double noise = spec.variance * std::pow(10.0, uniform(rng, -3.0, -1.0));

    const std::size_t n_obs = uniform_int(rng, 1, 15);
    std::vector<std::size_t> observed;
    for (std::size_t k = 0; k < n_obs; ++k) observed.push_back(uniform_int(rng, 0, grid.size() - 1));
    const Eigen::VectorXd y = random_vector(rng, n_obs);

    const Eigen::MatrixXd points = grid.points();
    const Eigen::MatrixXd k_all = covariance_matrix(spec, points);
    const GpPosterior prior = GpPosterior::from_moments(Eigen::VectorXd::Zero(k_all.rows()), k_all);
    const GpPosterior got = condition(prior, observed, y, noise, spec.variance);

    const Eigen::MatrixXd obs_points = grid.points(observed);
    const DenseMoments want =
        dense_condition(k_all, covariance_matrix(spec, points, obs_points), covariance_matrix(spec, obs_points),
                        y, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_obs), noise));
    tally.record(relative_deviation(got, want, spec.variance), s);
  }
  return tally.report();
}

OracleReport check_mf_conditioning(std::uint64_t seed, std::size_t instances) {
  Tally tally("mf_dense_conditioning", 1e-8);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = instance_seed(seed, 3, i);
    Rng rng(s);
    const std::size_t dims = uniform_int(rng, 1, 3);
    Ar1Model model;
    model.low_kernel = random_kernel(rng, dims, 0.2, 1.5);
    model.error_kernel = random_kernel(rng, dims, 0.2, 1.5);
    model.error_kernel.variance *= 0.2;
    model.rho = uniform(rng, -1.5, 1.5);
    model.low_noise = model.low_kernel.variance * std::pow(10.0, uniform(rng, -3.0, -1.0));
    model.high_noise = model.high_prior_variance() * std::pow(10.0, uniform(rng, -3.0, -1.0));

    const std::size_t n_low = uniform_int(rng, 1, 10);
    const std::size_t n_high = uniform_int(rng, 0, 10);
    const std::size_t n_query = uniform_int(rng, 1, 10);
    MultiFidelityData data{random_points(rng, n_low, dims), random_vector(rng, n_low),
                           random_points(rng, n_high, dims), random_vector(rng, n_high)};
    const Eigen::MatrixXd queries = random_points(rng, n_query, dims);
    const GpPosterior got = mf_posterior(model, data, queries);

    // Blocks of cov([f_L(X_L); f(X_H)]) and cov(f(Q), .) written out from the AR-1 structure.
    const auto& kl = model.low_kernel;
    const auto& kd = model.error_kernel;
    const double rho = model.rho;
    const auto nl = static_cast<Eigen::Index>(n_low);
    const auto nh = static_cast<Eigen::Index>(n_high);
    Eigen::MatrixXd k_oo(nl + nh, nl + nh);
    k_oo.topLeftCorner(nl, nl) = covariance_matrix(kl, data.low_inputs);
    k_oo.topRightCorner(nl, nh) = rho * covariance_matrix(kl, data.low_inputs, data.high_inputs);
    k_oo.bottomLeftCorner(nh, nl) = k_oo.topRightCorner(nl, nh).transpose();
    k_oo.bottomRightCorner(nh, nh) =
        rho * rho * covariance_matrix(kl, data.high_inputs) + covariance_matrix(kd, data.high_inputs);
    Eigen::MatrixXd k_qo(queries.rows(), nl + nh);
    k_qo.leftCols(nl) = rho * covariance_matrix(kl, queries, data.low_inputs);
    k_qo.rightCols(nh) =
        rho * rho * covariance_matrix(kl, queries, data.high_inputs) + covariance_matrix(kd, queries, data.high_inputs);
    const Eigen::MatrixXd k_qq = rho * rho * covariance_matrix(kl, queries) + covariance_matrix(kd, queries);
    Eigen::VectorXd y(nl + nh), noise(nl + nh);
    y << data.low_outputs, data.high_outputs;
    noise << Eigen::VectorXd::Constant(nl, model.low_noise), Eigen::VectorXd::Constant(nh, model.high_noise);

    const DenseMoments want = dense_condition(k_qq, k_qo, k_oo, y, noise);
    tally.record(relative_deviation(got, want, model.high_prior_variance()), s);
  }
  return tally.report();
}

OracleReport check_ar1_conditional_covariance(std::uint64_t seed, std::size_t instances) {
  Tally tally("ar1_conditional_covariance", 1e-6);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t s = instance_seed(seed, 4, i);
    Rng rng(s);
    const std::size_t dims = uniform_int(rng, 1, 3);
    Ar1Model model;
    model.low_kernel = random_kernel(rng, dims, 0.1, 0.5);
    model.error_kernel = random_kernel(rng, dims, 0.1, 1.0);
    model.error_kernel.variance *= 0.1;
    model.rho = uniform(rng, 0.2, 1.5);
    model.low_noise = 0.0;

    const std::size_t n_low = uniform_int(rng, 2, 10);
    const Eigen::MatrixXd low_x = random_points(rng, n_low, dims);
    std::vector<std::size_t> order(n_low);
    for (std::size_t k = 0; k < n_low; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(uniform_int(rng, 1, n_low));
    Eigen::MatrixXd high_x(static_cast<Eigen::Index>(order.size()), low_x.cols());
    for (std::size_t k = 0; k < order.size(); ++k)
      high_x.row(static_cast<Eigen::Index>(k)) = low_x.row(static_cast<Eigen::Index>(order[k]));

    const ConditionalCovarianceCheck check = conditional_covariance_check(model, low_x, high_x);
    tally.record(check.max_deviation / model.error_kernel.variance, s);
  }
  return tally.report();
}

OracleReport check_greedy_allocation(std::uint64_t seed) {
  Tally tally("greedy_allocation", 0.0);
  std::size_t instance = 0;
  for (std::size_t len = 1; len <= 3; ++len) {
    for (std::size_t horizon = 1; horizon <= 6; ++horizon) {
      for (std::size_t rep = 0; rep < 20; ++rep, ++instance) {
        const std::uint64_t s = instance_seed(seed, 5, instance);
        Rng local(s);
        std::vector<double> lambda(len);
        for (double& l : lambda) l = std::pow(10.0, uniform(local, -3.0, 1.0));
        if (rep == 0) std::fill(lambda.begin(), lambda.end(), 1.0);
        std::sort(lambda.begin(), lambda.end(), std::greater<>());
        const double noise = std::pow(10.0, uniform(local, -3.0, 0.0));

        const InfoGainBound greedy = info_gain_bound(lambda, noise, horizon);
        const double greedy_value = allocation_objective(lambda, noise, greedy.allocation);

        // Every allocation of `horizon` units over the first min(len, horizon) terms.
        const std::size_t slots = std::min(len, horizon);
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> alloc(horizon, 0);
        const auto enumerate = [&](auto&& self, std::size_t slot, std::size_t left) -> void {
          if (slot + 1 == slots) {
            alloc[slot] = left;
            best = std::max(best, allocation_objective(lambda, noise, alloc));
            return;
          }
          for (std::size_t m = 0; m <= left; ++m) {
            alloc[slot] = m;
            self(self, slot + 1, left - m);
          }
        };
        enumerate(enumerate, 0, horizon);
        tally.record(std::max(0.0, best - greedy_value), s);
      }
    }
  }
  return tally.report();
}

std::vector<OracleReport> check_nested_runs(std::uint64_t seed, std::size_t runs, std::size_t iterations) {
  Tally sets_tally("nested_safe_sets", 0.0);
  Tally bounds_tally("slope_bound_monotone", 0.0);

  ExperimentConfig config = default_config();
  config.algorithm = Algorithm::SafeSlope;
  config.mode = BoundMode::Nested;
  config.iterations = iterations;
  config.trials = runs;
  config.seed = seed;
  const ProblemSetup setup = build_problem(config);
  const auto initial = initial_sets_for(config, setup);
  const SurrogateModel model = make_model(config);
  const SearchSettings settings = make_settings(config);
  const Objective objective{setup.surfaces.f, setup.surfaces.f_low};

  for (std::size_t k = 0; k < runs; ++k) {
    const std::uint64_t s = trial_seed(seed, k);
    std::vector<char> previous(setup.grid.size(), 0);
    for (std::size_t p : initial[k]) previous[p] = 1;
    const std::vector<char> base = previous;
    SlopeBounds previous_bounds;
    double set_violations = 0.0;
    double bound_violations = 0.0;

    const SearchObserver observer = [&](const IterationSnapshot& snap) {
      const std::vector<char>& safe = snap.state.safe;
      for (std::size_t p = 0; p < safe.size(); ++p)
        if ((previous[p] && !safe[p]) || (base[p] && !safe[p])) set_violations += 1.0;
      previous = safe;
      const SlopeBounds& bounds = snap.state.slope_bounds;
      if (!previous_bounds.empty())
        for (std::size_t axis = 0; axis < bounds.size(); ++axis)
          for (Eigen::Index e = 0; e < bounds[axis].size(); ++e)
            if (!(bounds[axis][e] <= previous_bounds[axis][e])) bound_violations += 1.0;
      previous_bounds = bounds;
    };
    run_search(setup.grid, model, objective, initial[k], settings, s, observer);
    sets_tally.record(set_violations, s);
    bounds_tally.record(bound_violations, s);
  }
  return {sets_tally.report(), bounds_tally.report()};
}

std::vector<OracleReport> check_ucb_coverage(std::uint64_t seed, std::size_t samples) {
  constexpr double delta_f = 0.1;
  constexpr double delta_m = 0.1;
  const GridDomain grid(2, 5, {0.0, 0.0}, {1.0, 1.0});
  const std::vector<IncidenceMatrix> incidences = all_incidences(grid);
  KernelSpec spec;
  spec.family = KernelFamily::Matern52;
  spec.variance = 1.0;
  spec.lengthscales = {0.4};
  const double noise = 1e-2;
  const Eigen::MatrixXd k_all = covariance_matrix(spec, grid.points());
  const GpPosterior prior = GpPosterior::from_moments(Eigen::VectorXd::Zero(k_all.rows()), k_all);

  std::size_t f_violations = 0;
  std::size_t m_violations = 0;
  std::optional<std::uint64_t> first_f, first_m;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::uint64_t s = instance_seed(seed, 6, i);
    const Eigen::VectorXd f = sample_prior(spec, grid, s);
    Rng rng(s ^ 0xC0FFEEULL);
    std::normal_distribution<double> normal(0.0, std::sqrt(noise));
    const std::size_t t = uniform_int(rng, 1, 20);
    std::vector<std::size_t> observed;
    Eigen::VectorXd y(static_cast<Eigen::Index>(t));
    for (std::size_t k = 0; k < t; ++k) {
      observed.push_back(uniform_int(rng, 0, grid.size() - 1));
      y[static_cast<Eigen::Index>(k)] = f[static_cast<Eigen::Index>(observed.back())] + normal(rng);
    }
    const GpPosterior post = condition(prior, observed, y, noise, spec.variance);

    const double root_f = std::sqrt(beta_f(t, grid.size(), delta_f));
    if (((f - post.mean).cwiseAbs().array() > root_f * post.stddev.array()).any()) {
      ++f_violations;
      if (!first_f) first_f = s;
    }

    const SlopeField slopes = slope_field(post, incidences);
    const double root_m = std::sqrt(beta_m(t, grid.size(), grid.dims(), delta_m));
    bool slope_violation = false;
    for (std::size_t axis = 0; axis < incidences.size(); ++axis) {
      const Eigen::VectorXd truth = incidences[axis].matrix * f;
      slope_violation |= ((truth - slopes.mean[axis]).cwiseAbs().array() > root_m * slopes.stddev[axis].array()).any();
    }
    if (slope_violation) {
      ++m_violations;
      if (!first_m) first_m = s;
    }
  }

  auto make = [samples](std::string name, std::size_t violations, double delta, std::optional<std::uint64_t> first) {
    OracleReport r;
    r.name = std::move(name);
    r.instances = samples;
    r.max_deviation = samples ? static_cast<double>(violations) / static_cast<double>(samples) : 0.0;
    r.tolerance = delta + 0.03;
    r.passed = r.max_deviation <= r.tolerance;
    if (!r.passed) r.failing_seed = first;
    return r;
  };
  return {make("ucb_coverage_f", f_violations, delta_f, first_f),
          make("ucb_coverage_slopes", m_violations, delta_m, first_m)};
}

OracleReport check_width_shrinkage(std::uint64_t seed) {
  constexpr double epsilon = 0.1;
  Tally tally("width_shrinkage", epsilon);
  const GridDomain grid(1, 5, {-1.0}, {1.0});
  Objective objective;
  objective.truth.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = grid.coordinate(p, 0);
    objective.truth[static_cast<Eigen::Index>(p)] = x * x - 1.0;
  }
  SingleFidelityModel model;
  model.noise_variance = 1e-4;
  SearchSettings settings;
  settings.algorithm = Algorithm::SafeSlope;
  settings.mode = BoundMode::Nested;
  settings.h = 0.0;
  settings.budget = 100;
  std::vector<std::size_t> everything(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) everything[p] = p;

  double final_width = std::numeric_limits<double>::infinity();
  const SearchObserver observer = [&](const IterationSnapshot& snap) {
    double width = 0.0;
    const ConfidenceState& c = snap.state.confidence;
    for (const auto* set : {&snap.step.minimizers, &snap.step.expanders})
      for (std::size_t p : *set) {
        const auto i = static_cast<Eigen::Index>(p);
        width = std::max(width, c.upper[i] - c.lower[i]);
      }
    final_width = width;
  };
  const std::uint64_t s = instance_seed(seed, 7, 0);
  run_search(grid, model, objective, everything, settings, s, observer);
  tally.record(final_width, s);
  return tally.report();
}

std::vector<OracleReport> run_oracles(std::uint64_t seed, const OracleSizes& sizes) {
  std::vector<OracleReport> out;
  out.push_back(check_gp_conditioning(seed, sizes.instances));
  out.push_back(check_grid_conditioning(seed, sizes.instances));
  out.push_back(check_mf_conditioning(seed, sizes.instances));
  out.push_back(check_ar1_conditional_covariance(seed, sizes.instances));
  out.push_back(check_greedy_allocation(seed));
  for (OracleReport& r : check_nested_runs(seed, sizes.nested_runs, sizes.run_iterations)) out.push_back(r);
  for (OracleReport& r : check_ucb_coverage(seed, sizes.coverage_samples)) out.push_back(r);
  out.push_back(check_width_shrinkage(seed));
  return out;
}

void print_reports(std::ostream& out, const std::vector<OracleReport>& reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %9s %14s %12s  %s\n", "check", "instances", "max_deviation", "tolerance",
                "result");
  out << line;
  for (const OracleReport& r : reports) {
    std::snprintf(line, sizeof line, "%-28s %9zu %14.6g %12.6g  %s", r.name.c_str(), r.instances, r.max_deviation,
                  r.tolerance, r.passed ? "PASS" : "FAIL");
    out << line;
    if (r.failing_seed) out << " (seed " << *r.failing_seed << ")";
    out << "\n";
  }
}

}  // namespace safeslope
