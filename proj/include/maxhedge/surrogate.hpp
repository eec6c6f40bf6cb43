#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "maxhedge/core_model.hpp"

namespace maxhedge {

// Actions ordered by decreasing reward (ties by ascending index) together with
//   eps_j    = exp(-delta * sum_{k<=j} w_{s_k})
//   lambda_j = sum_{k>=j} (r_{s_k} - r_{s_{k+1}}) * eps_k,   r_{s_{n+1}} = 0.
struct SortedTrialView {
  std::vector<std::size_t> order;
  std::vector<double> epsilons;
  std::vector<double> lambdas;
};

// Stable descending-reward order, ties broken by ascending action index.
std::vector<std::size_t> reward_order(std::span<const double> rewards);

SortedTrialView sorted_view(std::span<const double> w, const TrialData& trial, double delta);
// Same, with a caller-supplied order (any order that is non-increasing in reward).
SortedTrialView sorted_view(std::span<const double> w, const TrialData& trial, double delta,
                            std::vector<std::size_t> order);

// Convex surrogate whose negation lower-bounds the expected profit of the sampler at w:
//   F(w) = delta <c+, w> + sum_i c-_i (1 - exp(-delta w_i))
//          - sum_j (r_{s_j} - r_{s_{j+1}}) (1 - exp(-delta sum_{k<=j} w_{s_k}))
double surrogate_value(std::span<const double> w, const TrialData& trial, double delta);

// Analytic gradient of surrogate_value: g_{s_j} = delta (c+_{s_j} + c-_{s_j} exp(-delta w_{s_j}) - lambda_j).
// One sort plus a prefix and a suffix sweep.
std::vector<double> surrogate_gradient(std::span<const double> w, const TrialData& trial, double delta);
std::vector<double> surrogate_gradient(const SortedTrialView& view, std::span<const double> w,
                                       const TrialData& trial, double delta);

// Learner state between trials.
struct WeightState {
  std::vector<double> w;
  // Running minimum of sqrt(n) / ||g_t||; empty until the first non-zero gradient.
  std::optional<double> eta_prime;
  // Index of the trial whose gradient will be applied next (1-based).
  std::size_t trial_index = 1;
  // Step size used by the most recent update; 0 when the step was skipped.
  double last_step = 0.0;

  static WeightState initial(std::size_t n) {
    WeightState state;
    state.w.assign(n, 0.0);
    return state;
  }
};

// eta'_t = min(eta'_{t-1}, sqrt(n)/||g||), eta_t = eta'_t / sqrt(2t), w <- project(w - eta_t g).
// With a zero gradient and no eta' yet the step is skipped.
WeightState update_weights(const WeightState& state, std::span<const double> gradient,
                           std::span<const double> z);

}  // namespace maxhedge
