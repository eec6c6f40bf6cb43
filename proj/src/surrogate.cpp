#include "maxhedge/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "maxhedge/errors.hpp"
#include "maxhedge/kernels.hpp"
#include "maxhedge/projection.hpp"

namespace maxhedge {

std::vector<std::size_t> reward_order(std::span<const double> rewards) {
  std::vector<std::size_t> order(rewards.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
  return order;
}

SortedTrialView sorted_view(std::span<const double> w, const TrialData& trial, double delta) {
  return sorted_view(w, trial, delta, reward_order(trial.rewards()));
}

SortedTrialView sorted_view(std::span<const double> w, const TrialData& trial, double delta,
                            std::vector<std::size_t> order) {
  const std::size_t n = trial.size();
  if (w.size() != n || order.size() != n) throw DimensionError("sorted_view: length mismatch");
  const auto r = trial.rewards();

  SortedTrialView view;
  view.order = std::move(order);
  view.epsilons.resize(n);
  view.lambdas.resize(n);

  double prefix = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    prefix += w[view.order[j]];
    view.epsilons[j] = std::exp(-delta * prefix);
  }
  double suffix = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double next = j + 1 < n ? r[view.order[j + 1]] : 0.0;
    suffix += (r[view.order[j]] - next) * view.epsilons[j];
    view.lambdas[j] = suffix;
  }
  return view;
}

double surrogate_value(std::span<const double> w, const TrialData& trial, double delta) {
  const std::size_t n = trial.size();
  if (w.size() != n) throw DimensionError("surrogate_value: length mismatch");
  const auto r = trial.rewards();
  const auto neg = trial.costs_neg();

  double value = delta * kernels::dot(trial.costs_pos(), w);
  for (std::size_t i = 0; i < n; ++i) {
    if (neg[i] != 0.0) value += neg[i] * -std::expm1(-delta * w[i]);
  }
  const auto order = reward_order(r);
  double prefix = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    prefix += w[order[j]];
    const double next = j + 1 < n ? r[order[j + 1]] : 0.0;
    value -= (r[order[j]] - next) * -std::expm1(-delta * prefix);
  }
  return value;
}

std::vector<double> surrogate_gradient(std::span<const double> w, const TrialData& trial, double delta) {
  return surrogate_gradient(sorted_view(w, trial, delta), w, trial, delta);
}

std::vector<double> surrogate_gradient(const SortedTrialView& view, std::span<const double> w,
                                       const TrialData& trial, double delta) {
  const auto pos = trial.costs_pos();
  const auto neg = trial.costs_neg();
  std::vector<double> g(trial.size());
  for (std::size_t j = 0; j < view.order.size(); ++j) {
    const std::size_t i = view.order[j];
    g[i] = delta * (pos[i] + neg[i] * std::exp(-delta * w[i]) - view.lambdas[j]);
  }
  return g;
}

WeightState update_weights(const WeightState& state, std::span<const double> gradient,
                           std::span<const double> z) {
  const std::size_t n = state.w.size();
  if (gradient.size() != n || z.size() != n) throw DimensionError("update_weights: length mismatch");

  WeightState next = state;
  ++next.trial_index;
  next.last_step = 0.0;

  const double norm = std::sqrt(kernels::dot(gradient, gradient));
  const double candidate = norm > 0.0 ? std::sqrt(static_cast<double>(n)) / norm
                                      : std::numeric_limits<double>::infinity();
  const double eta_prime = state.eta_prime ? std::min(*state.eta_prime, candidate) : candidate;
  if (!std::isfinite(eta_prime)) return next;

  next.eta_prime = eta_prime;
  const double step = eta_prime / std::sqrt(2.0 * static_cast<double>(state.trial_index));
  next.last_step = step;
  std::vector<double> y(n);
  kernels::axpy(-step, gradient, state.w, y);
  next.w = project_onto_feasible(y, z).x;
  return next;
}

}  // namespace maxhedge
