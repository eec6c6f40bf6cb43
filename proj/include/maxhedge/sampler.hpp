#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "maxhedge/core_model.hpp"
#include "maxhedge/rng.hpp"

namespace maxhedge {

// Class index reserved for actions with zero energy.
inline constexpr int kZeroClass = 0;

// One energy class. For q >= 1 its members satisfy tau^q * beta < z_i <= tau^(q-1) * beta.
struct EnergyGroup {
  int q = kZeroClass;
  std::vector<std::size_t> members;
};

// Non-empty energy classes, zero class first and then ascending q.
class Partition {
 public:
  Partition(std::size_t n, DerivedConstants constants, std::vector<EnergyGroup> groups)
      : n_(n), constants_(constants), groups_(std::move(groups)) {}

  std::size_t num_actions() const noexcept { return n_; }
  const DerivedConstants& constants() const noexcept { return constants_; }
  double delta() const noexcept { return constants_.delta; }
  std::span<const EnergyGroup> groups() const noexcept { return groups_; }
  // Number of actions covered by some group.
  std::size_t covered() const;

 private:
  std::size_t n_;
  DerivedConstants constants_;
  std::vector<EnergyGroup> groups_;
};

// Threshold tau^q * beta bounding class q from below (and class q + 1 from above).
double class_threshold(int q, double beta, double tau);

// Class index of a single energy: kZeroClass for z == 0, otherwise the unique q >= 1 with
// tau^q * beta < z <= tau^(q-1) * beta. Computed from logarithms, then corrected against the
// thresholds directly.
int energy_class(double z, double beta, double tau);

// Partition of every action under the action set's own constants. Requires beta < 1.
Partition build_partition(const ActionSet& action_set);

// Partition using supplied constants, restricted to actions with z_i < energy_cap. Used by the
// large-energy wrapper with beta replaced by 1/2.
Partition build_partition(std::span<const double> z, const DerivedConstants& constants,
                          double energy_cap = std::numeric_limits<double>::infinity());

// Per-group draw counts for a fixed weight vector.
struct GroupDrawPlan {
  const EnergyGroup* group = nullptr;
  double weight_sum = 0.0;        // S_q
  std::uint64_t full_draws = 0;   // m_q = floor(delta * S_q)
  double residual_mass = 0.0;     // delta * S_q - m_q, in [0, 1)
  std::vector<double> cumulative; // running weight sums over the members, for inverse-CDF draws
};

// Class-sampler draw schedule for one weight vector. Drawing from it is cheap, so Monte Carlo code
// plans once and draws many times.
class DrawPlan {
 public:
  DrawPlan(std::span<const double> w, const Partition& partition);

  std::span<const GroupDrawPlan> groups() const noexcept { return groups_; }
  // Total number of draws including residual ones.
  std::uint64_t total_draws() const;

  // Writes the drawn actions, sorted and without duplicates, into `out`.
  void draw(Rng& rng, std::vector<std::size_t>& out) const;

 private:
  std::vector<GroupDrawPlan> groups_;
};

// Draws S_t from w. Throws PreconditionError when w is not in C (tolerance 1e-9) or has the wrong
// length.
Selection sample_selection(std::span<const double> w, const Partition& partition,
                           const ActionSet& action_set, Rng& rng);

struct ProbabilityBounds {
  double lower;
  double upper;
};

// (1 - exp(-delta * w_i), delta * w_i).
ProbabilityBounds analytic_selection_bounds(std::span<const double> w, std::size_t i, double delta);

// 1 - exp(-delta * sum_{i in Z} w_i).
double analytic_intersection_lower_bound(std::span<const double> w, std::span<const std::size_t> subset,
                                         double delta);

}  // namespace maxhedge
