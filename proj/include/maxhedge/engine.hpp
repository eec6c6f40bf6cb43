#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "maxhedge/core_model.hpp"
#include "maxhedge/rng.hpp"
#include "maxhedge/sampler.hpp"
#include "maxhedge/surrogate.hpp"

namespace maxhedge {

struct TrialLog {
  std::size_t trial = 0;
  Selection selection;
  double profit = 0.0;
  double cumulative_profit = 0.0;
  double grad_norm = 0.0;
  // Step size eta_t applied after the trial; 0 when the step was skipped.
  double eta = 0.0;
};

struct EngineOptions {
  // Number of most recent logs kept in memory.
  std::size_t history_cap = std::numeric_limits<std::size_t>::max();
  // Receives every log as soon as it is produced (e.g. a streaming CSV writer).
  std::function<void(const TrialLog&)> sink;
};

// Runs the select / observe / update loop for one learner.
//
// When some action has energy >= 1/2 the engine switches to the large-energy wrapper: a biased coin
// with heads probability a = sum_{z_i >= 1/2} w_i / 4 either returns a single such action or runs
// the class sampler with beta replaced by 1/2 over the remaining actions. That mode has no regret
// guarantee and reports itself as experimental.
class Engine {
 public:
  Engine(ActionSet action_set, std::uint64_t seed, EngineOptions options = {});

  // Draws S_t for the current trial. Calling it again before observe() returns the same selection.
  const Selection& select();

  // Reveals the trial's rewards and costs, logs the realised profit and advances the weights.
  // Throws PreconditionError if select() was not called and DimensionError on a length mismatch.
  const TrialLog& observe(const TrialData& trial);

  const ActionSet& action_set() const noexcept { return action_set_; }
  const Partition& partition() const noexcept { return partition_; }
  const WeightState& weights() const noexcept { return weights_; }
  bool large_beta_mode() const noexcept { return large_beta_mode_; }
  // Constants the sampler and the gradient step actually use (beta = 1/2 in large-energy mode).
  const DerivedConstants& sampler_constants() const noexcept { return partition_.constants(); }
  std::size_t current_trial() const noexcept { return weights_.trial_index; }
  double cumulative_profit() const noexcept { return cumulative_profit_; }
  const std::deque<TrialLog>& history() const noexcept { return history_; }

 private:
  Selection select_large_beta(Rng& rng);

  ActionSet action_set_;
  bool large_beta_mode_;
  Partition partition_;
  std::vector<std::size_t> heavy_actions_;
  std::uint64_t seed_;
  EngineOptions options_;
  WeightState weights_;
  std::optional<Selection> pending_;
  double cumulative_profit_ = 0.0;
  std::deque<TrialLog> history_;
  TrialLog last_;
};

}  // namespace maxhedge
