#include "maxhedge/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxhedge/errors.hpp"

namespace maxhedge {

DerivedConstants DerivedConstants::from_beta(double beta) {
  DerivedConstants k;
  k.beta = beta;
  k.tau = 1.0 - std::sqrt(beta);
  k.delta = k.tau * k.tau;
  k.alpha = -std::expm1(-k.delta);
  return k;
}

DerivedConstants derive_constants(std::span<const double> z) {
  double beta = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0 && z[i] <= 1.0)) {
      throw InvalidEnergyError("energy z[" + std::to_string(i) + "] = " + std::to_string(z[i]) +
                               " is outside [0, 1]");
    }
    beta = std::max(beta, z[i]);
  }
  return DerivedConstants::from_beta(beta);
}

ActionSet::ActionSet(std::vector<double> z) : z_(std::move(z)), constants_(derive_constants(z_)) {
  if (z_.empty()) throw InvalidInputError("action set must contain at least one action");
}

CostSplit split_costs(std::span<const double> costs) {
  CostSplit out;
  out.positive.resize(costs.size());
  out.negative.resize(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    out.positive[i] = costs[i] > 0.0 ? costs[i] : 0.0;
    out.negative[i] = costs[i] < 0.0 ? costs[i] : 0.0;
  }
  return out;
}

TrialData::TrialData(std::vector<double> rewards, std::vector<double> costs)
    : rewards_(std::move(rewards)), costs_(std::move(costs)) {
  if (rewards_.size() != costs_.size()) {
    throw DimensionError("reward vector has " + std::to_string(rewards_.size()) +
                         " entries but cost vector has " + std::to_string(costs_.size()));
  }
  for (std::size_t i = 0; i < rewards_.size(); ++i) {
    if (!std::isfinite(rewards_[i]) || rewards_[i] < 0.0) {
      throw InvalidInputError("reward r[" + std::to_string(i) + "] must be finite and non-negative");
    }
    if (!std::isfinite(costs_[i])) {
      throw InvalidInputError("cost c[" + std::to_string(i) + "] must be finite");
    }
  }
  split_ = split_costs(costs_);
}

Selection::Selection(std::vector<std::size_t> actions, const ActionSet& action_set)
    : actions_(std::move(actions)) {
  std::sort(actions_.begin(), actions_.end());
  if (std::adjacent_find(actions_.begin(), actions_.end()) != actions_.end()) {
    throw PreconditionError("selection contains a repeated action");
  }
  if (!actions_.empty() && actions_.back() >= action_set.size()) {
    throw PreconditionError("selection index " + std::to_string(actions_.back()) +
                            " out of range for " + std::to_string(action_set.size()) + " actions");
  }
  for (std::size_t i : actions_) total_energy_ += action_set.energy(i);
}

double profit(std::span<const std::size_t> actions, const TrialData& trial) {
  double best = 0.0;
  double cost = 0.0;
  for (std::size_t i : actions) {
    best = std::max(best, trial.rewards()[i]);
    cost += trial.costs()[i];
  }
  return best - cost;
}

double discounted_profit(std::span<const std::size_t> actions, const TrialData& trial,
                         double alpha, double delta) {
  double best = 0.0;
  double cost = 0.0;
  // Exactly one of c^- and c^+ is non-zero, so alpha = delta = 1 reproduces profit() bit for bit.
  for (std::size_t i : actions) {
    best = std::max(best, trial.rewards()[i]);
    cost += alpha * trial.costs_neg()[i] + delta * trial.costs_pos()[i];
  }
  return alpha * best - cost;
}

}  // namespace maxhedge
