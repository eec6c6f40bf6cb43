#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maxhedge {

// Absolute slack used whenever a selection's total energy is compared against the unit budget.
inline constexpr double kBudgetSlack = 1e-12;

// Constants derived from the largest action energy.
//   tau   = 1 - sqrt(beta)
//   delta = tau^2
//   alpha = 1 - exp(-delta)
struct DerivedConstants {
  double beta = 0.0;
  double tau = 1.0;
  double delta = 1.0;
  double alpha = 0.0;

  // Constants for an arbitrary beta in [0, 1]; used directly by the large-energy wrapper.
  static DerivedConstants from_beta(double beta);
};

// Computes the constants for an energy vector. Throws InvalidEnergyError for z_i outside [0, 1].
DerivedConstants derive_constants(std::span<const double> z);

// The fixed action energies. Immutable after construction.
class ActionSet {
 public:
  explicit ActionSet(std::vector<double> z);

  std::size_t size() const noexcept { return z_.size(); }
  std::span<const double> energies() const noexcept { return z_; }
  double energy(std::size_t i) const { return z_[i]; }

  const DerivedConstants& constants() const noexcept { return constants_; }
  double beta() const noexcept { return constants_.beta; }
  double tau() const noexcept { return constants_.tau; }
  double delta() const noexcept { return constants_.delta; }
  double alpha() const noexcept { return constants_.alpha; }

  // True when the plain sampler applies (beta < 1/2).
  bool standard_path() const noexcept { return constants_.beta < 0.5; }

 private:
  std::vector<double> z_;
  DerivedConstants constants_;
};

struct CostSplit {
  std::vector<double> positive;
  std::vector<double> negative;
};

// Elementwise max(0, c) and min(0, c).
CostSplit split_costs(std::span<const double> costs);

// Rewards and costs revealed at the end of one trial.
class TrialData {
 public:
  // Throws InvalidInputError on negative or non-finite rewards, non-finite costs,
  // and DimensionError when the two vectors differ in length.
  TrialData(std::vector<double> rewards, std::vector<double> costs);

  std::size_t size() const noexcept { return rewards_.size(); }
  std::span<const double> rewards() const noexcept { return rewards_; }
  std::span<const double> costs() const noexcept { return costs_; }
  std::span<const double> costs_pos() const noexcept { return split_.positive; }
  std::span<const double> costs_neg() const noexcept { return split_.negative; }

  friend bool operator==(const TrialData& a, const TrialData& b) {
    return a.rewards_ == b.rewards_ && a.costs_ == b.costs_;
  }

 private:
  std::vector<double> rewards_;
  std::vector<double> costs_;
  CostSplit split_;
};

// A set of distinct action indices (0-based, ascending) with its total energy.
class Selection {
 public:
  Selection() = default;

  // Sorts and validates the indices against the action set. Throws PreconditionError on an
  // out-of-range or repeated index.
  Selection(std::vector<std::size_t> actions, const ActionSet& action_set);

  std::span<const std::size_t> actions() const noexcept { return actions_; }
  double total_energy() const noexcept { return total_energy_; }
  bool empty() const noexcept { return actions_.empty(); }
  std::size_t size() const noexcept { return actions_.size(); }
  bool within_budget() const noexcept { return total_energy_ <= 1.0 + kBudgetSlack; }

  friend bool operator==(const Selection&, const Selection&) = default;

 private:
  std::vector<std::size_t> actions_;
  double total_energy_ = 0.0;
};

// max_{i in S} r_i - sum_{i in S} c_i, with the empty maximum taken as 0.
double profit(std::span<const std::size_t> actions, const TrialData& trial);
inline double profit(const Selection& s, const TrialData& trial) { return profit(s.actions(), trial); }

// alpha * max r - alpha * sum c^- - delta * sum c^+ over S; 0 for the empty set.
double discounted_profit(std::span<const std::size_t> actions, const TrialData& trial,
                         double alpha, double delta);

}  // namespace maxhedge
