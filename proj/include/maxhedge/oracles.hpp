#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maxhedge/core_model.hpp"

namespace maxhedge {

// Largest action count best_fixed_subset will enumerate.
inline constexpr std::size_t kMaxComparatorActions = 20;

struct ComparatorResult {
  std::vector<std::size_t> subset;  // ascending
  double discounted_total = 0.0;
  bool feasible = true;
};

// Exact argmax over budget-feasible S of sum_t discounted_profit(S, trial_t, alpha, delta), ties going
// to the lexicographically smallest ascending index list (the empty set first). Depth-first
// enumeration with energy and optimistic-value pruning. Throws CapacityError for n > 20.
ComparatorResult best_fixed_subset(std::span<const TrialData> trials, const ActionSet& action_set,
                                   double alpha, double delta);

// Value of a fixed subset summed over the stream; the same arithmetic the comparator uses.
double discounted_total(std::span<const std::size_t> subset, std::span<const TrialData> trials,
                        double alpha, double delta);

// Every independent draw the class sampler makes for a given w: draw d returns action i with
// probability probs[k] for members[k], and nothing with the remaining mass.
struct DrawDistribution {
  std::vector<std::size_t> members;
  std::vector<double> probs;
};

// Enumerates the draws of the standard-path sampler from first principles (class thresholds by
// direct comparison, floor/residual split, per-draw probabilities).
std::vector<DrawDistribution> enumerate_draws(std::span<const double> w, const ActionSet& action_set);

// P(Z meets S_t) = 1 - prod_d (1 - P(draw d lands in Z)).
double exact_intersection_probability(std::span<const DrawDistribution> draws,
                                      std::span<const std::size_t> subset);

// Exact E[L_t] for the standard-path sampler: the max-reward term through the reward-sorted prefix
// decomposition, each prefix hit probability in product form, plus sum_i c_i P(i in S_t).
double exact_expected_profit(std::span<const double> w, const ActionSet& action_set, const TrialData& trial);

struct SelectionEstimate {
  std::vector<double> frequency;
  std::vector<double> std_error;  // sqrt(p (1 - p) / N)
  std::size_t samples = 0;
};

// N independent draws from the standard-path sampler at w. Throws PreconditionError for N = 0.
SelectionEstimate estimate_selection_probs(std::span<const double> w, const ActionSet& action_set,
                                           std::size_t samples, std::uint64_t seed);

// Central differences (f(w + h e_i) - f(w - h e_i)) / 2h. Coordinates with w_i < h use the
// second-order forward stencil (-3 f(w) + 4 f(w + h e_i) - f(w + 2h e_i)) / 2h so the probe never
// leaves the non-negative orthant. Throws PreconditionError for h <= 0.
std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> w, double h);

// Brute-force nearest point of the grid {0, res, ..., 1}^n intersected with C. n <= 4, otherwise
// CapacityError.
std::vector<double> grid_projection(std::span<const double> y, std::span<const double> z, double resolution);

}  // namespace maxhedge
