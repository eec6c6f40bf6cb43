#include "maxhedge/engine.hpp"

#include <cmath>
#include <string>

#include "maxhedge/errors.hpp"

namespace maxhedge {

namespace {

constexpr double kLargeEnergy = 0.5;

Partition make_partition(const ActionSet& set, bool large_beta) {
  if (!large_beta) return build_partition(set);
  return build_partition(set.energies(), DerivedConstants::from_beta(kLargeEnergy), kLargeEnergy);
}

}  // namespace

Engine::Engine(ActionSet action_set, std::uint64_t seed, EngineOptions options)
    : action_set_(std::move(action_set)),
      large_beta_mode_(!action_set_.standard_path()),
      partition_(make_partition(action_set_, large_beta_mode_)),
      seed_(seed),
      options_(std::move(options)),
      weights_(WeightState::initial(action_set_.size())) {
  if (large_beta_mode_) {
    for (std::size_t i = 0; i < action_set_.size(); ++i) {
      if (action_set_.energy(i) >= kLargeEnergy) heavy_actions_.push_back(i);
    }
  }
}

const Selection& Engine::select() {
  if (pending_) return *pending_;
  Rng rng = Rng::stream(seed_, weights_.trial_index);
  if (large_beta_mode_) {
    pending_ = select_large_beta(rng);
  } else {
    pending_ = sample_selection(weights_.w, partition_, action_set_, rng);
  }
  return *pending_;
}

Selection Engine::select_large_beta(Rng& rng) {
  const auto& w = weights_.w;
  double heavy_weight = 0.0;
  for (std::size_t i : heavy_actions_) heavy_weight += w[i];
  const double heads = heavy_weight / 4.0;
  if (heads > 0.0 && rng.uniform() < heads) {
    // P(i) = w_i / (4 a) = w_i / heavy_weight.
    const double target = rng.uniform() * heavy_weight;
    double running = 0.0;
    std::size_t chosen = heavy_actions_.back();
    for (std::size_t i : heavy_actions_) {
      running += w[i];
      if (target < running) {
        chosen = i;
        break;
      }
    }
    return Selection({chosen}, action_set_);
  }
  DrawPlan plan(w, partition_);
  std::vector<std::size_t> drawn;
  plan.draw(rng, drawn);
  return Selection(std::move(drawn), action_set_);
}

const TrialLog& Engine::observe(const TrialData& trial) {
  if (!pending_) throw PreconditionError("observe called before select for this trial");
  if (trial.size() != action_set_.size()) {
    throw DimensionError("trial has " + std::to_string(trial.size()) + " actions, engine has " +
                         std::to_string(action_set_.size()));
  }
  const double delta = partition_.delta();
  const auto gradient = surrogate_gradient(weights_.w, trial, delta);
  double norm_sq = 0.0;
  for (double g : gradient) norm_sq += g * g;

  TrialLog log;
  log.trial = weights_.trial_index;
  log.selection = std::move(*pending_);
  pending_.reset();
  log.profit = profit(log.selection, trial);
  cumulative_profit_ += log.profit;
  log.cumulative_profit = cumulative_profit_;
  log.grad_norm = std::sqrt(norm_sq);

  weights_ = update_weights(weights_, gradient, action_set_.energies());
  log.eta = weights_.last_step;

  if (options_.sink) options_.sink(log);
  if (options_.history_cap > 0) {
    if (history_.size() == options_.history_cap) history_.pop_front();
    history_.push_back(std::move(log));
    return history_.back();
  }
  last_ = std::move(log);
  return last_;
}

}  // namespace maxhedge
