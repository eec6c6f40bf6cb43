#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxhedge/core_model.hpp"

namespace maxhedge {

enum class EnvironmentKind { facility_location, knapsack_median, knapsack_01, random_adversarial };

std::string_view kind_name(EnvironmentKind kind);
// Throws ConfigError for an unknown name.
EnvironmentKind parse_kind(std::string_view name);

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::random_adversarial;
  std::size_t n = 8;
  std::size_t T = 100;
  std::uint64_t seed = 1;

  // Sites and users live in the unit hypercube of this dimension (Euclidean distance).
  std::size_t dimension = 2;
  // Reward scale: max(0, r_max - distance) for the location problems, r-hat for random_adversarial.
  double r_max = 1.0;
  // Per-trial facility opening cost range (facility_location).
  double cost_min = 0.0;
  double cost_max = 0.5;
  // Largest energy drawn (knapsack_median, knapsack_01, random_adversarial).
  double beta_max = 0.3;
  // Item values lie in [0, value_max] (knapsack_01).
  double value_max = 1.0;
  // Costs lie in [-c_hat, c_hat] (random_adversarial).
  double c_hat = 1.0;
  // Number of blocks over which the reward-maximising action rotates; 0 disables (random_adversarial).
  std::size_t shift_blocks = 0;

  // Every violated constraint, one message each; empty when valid.
  std::vector<std::string> validate() const;
};

struct TrialStream {
  ActionSet action_set;
  std::vector<TrialData> trials;
};

// Reward a user at distance d receives from a site: max(0, r_max - d).
double distance_reward(std::span<const double> user, std::span<const double> site, double r_max);

// z = 0, c >= 0, rewards from user distances.
TrialStream gen_facility_location(const EnvironmentSpec& spec);
// c = 0, z in (0, beta_max], rewards from user distances.
TrialStream gen_knapsack_median(const EnvironmentSpec& spec);
// r = 0, c = -v with v >= 0, z in (0, beta_max].
TrialStream gen_knapsack_01(const EnvironmentSpec& spec);
// r in [0, r_max], c in [-c_hat, c_hat], z in [0, beta_max], optional rotating best action.
TrialStream gen_random_adversarial(const EnvironmentSpec& spec);

// Dispatches on spec.kind after validation (throws ConfigError listing every violation).
TrialStream generate(const EnvironmentSpec& spec);

// Empty when the stream satisfies the sign/zero pattern of `kind`; otherwise the first violation.
std::string check_pattern(const TrialStream& stream, EnvironmentKind kind);

// Line-oriented stream file:
//   stream,<n>,<T>,<z_1>,...,<z_n>
//   <t>,<r_1>,...,<r_n>,<c_1>,...,<c_n>     (t = 1..T)
// Floats carry 17 significant digits, so reading back reproduces every value exactly.
void write_stream(std::ostream& out, const TrialStream& stream);
void write_stream_file(const std::string& path, const TrialStream& stream);
// Throws ParseError naming the offending line.
TrialStream read_stream(std::istream& in);
TrialStream read_stream_file(const std::string& path);

}  // namespace maxhedge
