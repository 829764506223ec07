#include "safeslope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace safeslope {

namespace {

constexpr double kScale = 0.5 / (1.0 - 0.36787944117144233);  // (1/2) / (1 - e^-1)

std::vector<double> clean_eigenvalues(std::span<const double> eigenvalues) {
  std::vector<double> out(eigenvalues.begin(), eigenvalues.end());
  const double top = out.empty() ? 0.0 : std::max(1.0, *std::max_element(out.begin(), out.end()));
  for (double& v : out) {
    if (!std::isfinite(v) || v < -1e-9 * top) throw std::invalid_argument("info gain: negative eigenvalue");
    v = std::max(v, 0.0);
  }
  if (!std::is_sorted(out.begin(), out.end(), std::greater<>()))
    throw std::invalid_argument("info gain: eigenvalues must be sorted descending");
  return out;
}

// Hands out units one at a time to the term with the largest marginal gain.
class GreedyAllocator {
 public:
  GreedyAllocator(std::vector<double> lambda, double noise_variance)
      : lambda_(std::move(lambda)), inv_noise_(1.0 / noise_variance), units_(lambda_.size(), 0) {
    for (std::size_t j = 0; j < lambda_.size(); ++j) heap_.push({gain(j), j});
  }

  bool empty() const { return lambda_.empty(); }

  // Returns the increase of the unscaled objective.
  double allocate() {
    const Entry top = heap_.top();
    heap_.pop();
    ++units_[top.index];
    heap_.push({gain(top.index), top.index});
    return top.gain;
  }

  const std::vector<std::size_t>& units() const { return units_; }

 private:
  struct Entry {
    double gain;
    std::size_t index;
    bool operator<(const Entry& other) const {
      if (gain != other.gain) return gain < other.gain;
      return index > other.index;
    }
  };

  double gain(std::size_t j) const {
    const double c = inv_noise_ * lambda_[j];
    return std::log1p(c / (1.0 + c * static_cast<double>(units_[j])));
  }

  std::vector<double> lambda_;
  double inv_noise_;
  std::vector<std::size_t> units_;
  std::priority_queue<Entry> heap_;
};

void check_noise(double noise_variance) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("info gain: noise variance must be positive");
}

}  // namespace

double allocation_objective(std::span<const double> eigenvalues, double noise_variance,
                            std::span<const std::size_t> allocation) {
  check_noise(noise_variance);
  double total = 0.0;
  for (std::size_t t = 0; t < allocation.size() && t < eigenvalues.size(); ++t)
    total += std::log1p(static_cast<double>(allocation[t]) * eigenvalues[t] / noise_variance);
  return total;
}

InfoGainBound info_gain_bound(std::span<const double> eigenvalues, double noise_variance,
                              std::size_t horizon) {
  check_noise(noise_variance);
  if (horizon == 0) throw std::invalid_argument("info gain: horizon must be >= 1");
  std::vector<double> lambda = clean_eigenvalues(eigenvalues);

  InfoGainBound out;
  out.horizon = horizon;
  out.eigenvalues = lambda;
  out.noise_variance = noise_variance;
  out.allocation.assign(horizon, 0);

  lambda.resize(horizon, 0.0);
  GreedyAllocator greedy(std::move(lambda), noise_variance);
  double total = 0.0;
  for (std::size_t u = 0; u < horizon; ++u) total += greedy.allocate();
  out.allocation = greedy.units();
  out.value = kScale * total;
  return out;
}

std::vector<double> info_gain_bound_curve(std::span<const double> eigenvalues, double noise_variance,
                                          std::size_t max_horizon) {
  check_noise(noise_variance);
  std::vector<double> lambda = clean_eigenvalues(eigenvalues);
  std::vector<double> out;
  out.reserve(max_horizon);
  if (lambda.empty()) {
    out.assign(max_horizon, 0.0);
    return out;
  }
  // Restricting to the first T terms never binds: a greedy unit only reaches
  // term j after every earlier term holds one, which needs at least j + 1 units.
  GreedyAllocator greedy(std::move(lambda), noise_variance);
  double total = 0.0;
  for (std::size_t t = 1; t <= max_horizon; ++t) {
    total += greedy.allocate();
    out.push_back(kScale * total);
  }
  return out;
}

double c1(double variance, double noise_variance) {
  if (!(variance > 0.0) || !(noise_variance > 0.0))
    throw std::invalid_argument("c1: variance and noise must be positive");
  return 8.0 * variance / std::log1p(variance / noise_variance);
}

std::optional<std::size_t> convergence_time(const std::function<double(std::size_t)>& gamma,
                                            const std::function<double(std::size_t)>& beta,
                                            double c1_value, std::size_t reach_cardinality,
                                            double epsilon, std::size_t cap) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("convergence time: epsilon must be positive");
  const double threshold = c1_value * static_cast<double>(reach_cardinality + 1) / (epsilon * epsilon);
  for (std::size_t t = 1; t <= cap; ++t) {
    const double denom = gamma(t) * beta(t);
    if (static_cast<double>(t) >= threshold * denom) return t;
  }
  return std::nullopt;
}

std::vector<char> reachability_closure(const GridDomain& grid, std::span<const IncidenceMatrix> incidences,
                                       const Eigen::Ref<const Eigen::VectorXd>& f, const SlopeBounds& bounds,
                                       std::span<const std::size_t> seed_set, double h, double epsilon) {
  if (seed_set.empty()) throw std::invalid_argument("reachability: seed set must be nonempty");
  if (f.size() != static_cast<Eigen::Index>(grid.size()))
    throw std::invalid_argument("reachability: objective does not cover the grid");
  if (incidences.size() != grid.dims() || bounds.size() != grid.dims())
    throw std::invalid_argument("reachability: need one incidence matrix and bound vector per axis");

  std::vector<char> member(grid.size(), 0);
  std::vector<std::size_t> frontier;
  for (std::size_t p : seed_set) {
    if (p >= grid.size()) throw std::out_of_range("reachability: seed point out of range");
    if (!member[p]) frontier.push_back(p);
    member[p] = 1;
  }
  // Worklist form of the fixpoint: each newly added point is expanded once.
  while (!frontier.empty()) {
    const std::size_t x = frontier.back();
    frontier.pop_back();
    for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
      for (std::size_t y : grid.vicinity(x, axis)) {
        if (member[y]) continue;
        const double slope = bounds[axis][static_cast<Eigen::Index>(incidences[axis].edge_between(x, y))];
        if (f[static_cast<Eigen::Index>(x)] + slope * incidences[axis].spacing + epsilon <= h) {
          member[y] = 1;
          frontier.push_back(y);
        }
      }
    }
  }
  return member;
}

std::vector<double> cumulative_regret(std::span<const double> sampled_values, double f_star) {
  std::vector<double> out;
  out.reserve(sampled_values.size());
  double total = 0.0;
  for (double v : sampled_values) {
    total += v - f_star;
    out.push_back(total);
  }
  return out;
}

}  // namespace safeslope
