#include "safeslope/safe_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace safeslope {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "safeslope") return Algorithm::SafeSlope;
  if (name == "safeucb") return Algorithm::SafeUcb;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

BoundMode parse_bound_mode(std::string_view name) {
  if (name == "nested") return BoundMode::Nested;
  if (name == "unnested") return BoundMode::Unnested;
  throw std::invalid_argument("unknown bound mode '" + std::string(name) + "'");
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::SafeSlope ? "safeslope" : "safeucb";
}

std::string to_string(BoundMode mode) { return mode == BoundMode::Nested ? "nested" : "unnested"; }

double pi_schedule(std::size_t t) {
  const double td = static_cast<double>(t);
  return td * td * std::numbers::pi * std::numbers::pi / 6.0;
}

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("beta: delta must lie in (0, 1)");
}

}  // namespace

double beta_f(std::size_t t, std::size_t grid_size, double delta_f) {
  check_delta(delta_f);
  if (t == 0) throw std::invalid_argument("beta: t must be >= 1");
  return 2.0 * std::log(static_cast<double>(grid_size) * pi_schedule(t) / delta_f);
}

double beta_m(std::size_t t, std::size_t grid_size, std::size_t dims, double delta_m) {
  check_delta(delta_m);
  if (t == 0) throw std::invalid_argument("beta: t must be >= 1");
  return 2.0 * std::log(static_cast<double>(grid_size) * static_cast<double>(dims) * pi_schedule(t) /
                        delta_m);
}

std::size_t SafeSearchState::safe_count() const {
  return static_cast<std::size_t>(std::count(safe.begin(), safe.end(), char{1}));
}

std::vector<std::size_t> SafeSearchState::safe_set() const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < safe.size(); ++p)
    if (safe[p]) out.push_back(p);
  return out;
}

SafeSearchState make_search_state(const GridDomain& grid, std::span<const IncidenceMatrix> incidences,
                                   std::vector<std::size_t> initial_safe, double h, BoundMode mode) {
  if (initial_safe.empty()) throw std::invalid_argument("search: initial safe set must be nonempty");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(grid.size());

  SafeSearchState state;
  state.h = h;
  state.safe.assign(grid.size(), 0);
  state.confidence.mode = mode;
  state.confidence.lower = Eigen::VectorXd::Constant(n, -inf);
  state.confidence.upper = Eigen::VectorXd::Constant(n, inf);
  for (std::size_t p : initial_safe) {
    if (p >= grid.size()) throw std::out_of_range("search: initial safe point out of range");
    state.safe[p] = 1;
    if (mode == BoundMode::Nested) state.confidence.upper[static_cast<Eigen::Index>(p)] = h;
  }
  std::sort(initial_safe.begin(), initial_safe.end());
  initial_safe.erase(std::unique(initial_safe.begin(), initial_safe.end()), initial_safe.end());
  state.initial_safe = std::move(initial_safe);
  state.slope_bounds = initial_slope_bounds(incidences);
  return state;
}

namespace {

void update_confidence(ConfidenceState& c, const GpPosterior& posterior, double beta) {
  if (posterior.mean.size() != c.lower.size())
    throw std::invalid_argument("search: posterior does not cover the grid");
  const double root = std::sqrt(beta);
  const Eigen::VectorXd q_lo = posterior.mean - root * posterior.stddev;
  const Eigen::VectorXd q_hi = posterior.mean + root * posterior.stddev;
  if (c.mode == BoundMode::Unnested) {
    c.lower = q_lo;
    c.upper = q_hi;
    return;
  }
  for (Eigen::Index p = 0; p < c.lower.size(); ++p) {
    const double lo = std::max(c.lower[p], q_lo[p]);
    const double hi = std::min(c.upper[p], q_hi[p]);
    if (lo <= hi) {
      c.lower[p] = lo;
      c.upper[p] = hi;
    } else if (q_lo[p] > c.upper[p]) {
      // Disjoint intervals: collapse onto the old endpoint nearest the new one.
      c.lower[p] = c.upper[p];
    } else {
      c.upper[p] = c.lower[p];
    }
  }
}

std::size_t argmin_upper(const SafeSearchState& state) {
  std::size_t best = state.safe.size();
  for (std::size_t p = 0; p < state.safe.size(); ++p) {
    if (!state.safe[p]) continue;
    if (best == state.safe.size() ||
        state.confidence.upper[static_cast<Eigen::Index>(p)] < state.confidence.upper[static_cast<Eigen::Index>(best)])
      best = p;
  }
  return best;
}

std::optional<std::size_t> widest(const SafeSearchState& state, std::span<const std::size_t> candidates) {
  std::optional<std::size_t> best;
  double best_width = -std::numeric_limits<double>::infinity();
  for (std::size_t p : candidates) {  // candidates are ascending, so ties keep the lowest index
    const auto i = static_cast<Eigen::Index>(p);
    const double width = state.confidence.upper[i] - state.confidence.lower[i];
    if (!best || width > best_width) {
      best = p;
      best_width = width;
    }
  }
  return best;
}

}  // namespace

StepResult safeslope_step(SafeSearchState& state, const GridDomain& grid,
                          std::span<const IncidenceMatrix> incidences, const GpPosterior& posterior,
                          const SlopeField& slopes, double beta_f_t, double beta_m_t) {
  if (state.safe_count() == 0) throw std::invalid_argument("safeslope: previous safe set is empty");
  if (incidences.size() != grid.dims() || slopes.axes() != grid.dims())
    throw std::invalid_argument("safeslope: need one incidence matrix and slope block per axis");

  update_confidence(state.confidence, posterior, beta_f_t);
  const SlopeBounds q = slope_magnitude_bound(slopes, beta_m_t);
  if (state.confidence.mode == BoundMode::Nested)
    update_slope_bounds(state.slope_bounds, q);
  else
    state.slope_bounds = q;

  const Eigen::VectorXd& lower = state.confidence.lower;
  const Eigen::VectorXd& upper = state.confidence.upper;
  const double h = state.h;

  StepResult result;
  const std::vector<std::size_t> previous = state.safe_set();
  for (std::size_t x : previous) {
    for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
      const double d = incidences[axis].spacing;
      for (std::size_t y : grid.vicinity(x, axis)) {
        if (state.safe[y]) continue;
        const double slope = state.slope_bounds[axis][static_cast<Eigen::Index>(incidences[axis].edge_between(x, y))];
        if (upper[static_cast<Eigen::Index>(x)] + slope * d <= h) {
          state.safe[y] = 1;
          result.newly_safe.push_back(y);
        }
      }
    }
  }
  std::sort(result.newly_safe.begin(), result.newly_safe.end());

  const std::vector<std::size_t> current = state.safe_set();
  double min_upper = std::numeric_limits<double>::infinity();
  for (std::size_t x : current) min_upper = std::min(min_upper, upper[static_cast<Eigen::Index>(x)]);

  std::vector<std::size_t> candidates;
  for (std::size_t x : current) {
    const auto xi = static_cast<Eigen::Index>(x);
    const bool minimizer = lower[xi] <= min_upper;
    std::size_t growth = 0;
    for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
      const double d = incidences[axis].spacing;
      for (std::size_t y : grid.vicinity(x, axis)) {
        if (state.safe[y]) continue;
        const double slope = state.slope_bounds[axis][static_cast<Eigen::Index>(incidences[axis].edge_between(x, y))];
        if (lower[xi] + slope * d <= h) ++growth;
      }
    }
    if (minimizer) result.minimizers.push_back(x);
    if (growth > 0) result.expanders.push_back(x);
    if (minimizer || growth > 0) candidates.push_back(x);
  }

  result.incumbent = argmin_upper(state);
  result.next = widest(state, candidates);
  ++state.iteration;
  return result;
}

StepResult safeucb_step(SafeSearchState& state, const GpPosterior& posterior, double beta_f_t) {
  update_confidence(state.confidence, posterior, beta_f_t);
  StepResult result;
  for (std::size_t p = 0; p < state.safe.size(); ++p) {
    const bool ok = state.confidence.upper[static_cast<Eigen::Index>(p)] <= state.h;
    if (ok && !state.safe[p]) result.newly_safe.push_back(p);
    state.safe[p] = ok ? 1 : 0;
  }
  const std::vector<std::size_t> current = state.safe_set();
  result.incumbent = current.empty() ? state.safe.size() : argmin_upper(state);
  result.next = widest(state, current);
  ++state.iteration;
  return result;
}

}  // namespace safeslope
