#include "maxhedge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "maxhedge/errors.hpp"
#include "maxhedge/projection.hpp"

namespace maxhedge {

std::size_t Partition::covered() const {
  std::size_t total = 0;
  for (const auto& g : groups_) total += g.members.size();
  return total;
}

double class_threshold(int q, double beta, double tau) { return std::pow(tau, q) * beta; }

int energy_class(double z, double beta, double tau) {
  if (z == 0.0) return kZeroClass;
  int q = 1;
  if (z < beta) {
    const double estimate = std::ceil(std::log(z / beta) / std::log(tau));
    q = std::max(1, static_cast<int>(estimate));
  }
  while (q > 1 && z > class_threshold(q - 1, beta, tau)) --q;
  while (z <= class_threshold(q, beta, tau)) ++q;
  return q;
}

Partition build_partition(const ActionSet& action_set) {
  if (action_set.beta() >= 1.0) {
    throw PreconditionError("build_partition: beta must be below 1 on the standard path");
  }
  return build_partition(action_set.energies(), action_set.constants());
}

Partition build_partition(std::span<const double> z, const DerivedConstants& constants,
                          double energy_cap) {
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] < energy_cap)) continue;
    classes[energy_class(z[i], constants.beta, constants.tau)].push_back(i);
  }
  std::vector<EnergyGroup> groups;
  groups.reserve(classes.size());
  for (auto& [q, members] : classes) groups.push_back({q, std::move(members)});
  return Partition(z.size(), constants, std::move(groups));
}

DrawPlan::DrawPlan(std::span<const double> w, const Partition& partition) {
  const double delta = partition.delta();
  groups_.reserve(partition.groups().size());
  for (const auto& group : partition.groups()) {
    GroupDrawPlan plan;
    plan.group = &group;
    plan.cumulative.reserve(group.members.size());
    double sum = 0.0;
    for (std::size_t i : group.members) {
      sum += w[i];
      plan.cumulative.push_back(sum);
    }
    plan.weight_sum = sum;
    if (sum > 0.0) {
      const double mass = delta * sum;
      const double whole = std::floor(mass);
      plan.full_draws = static_cast<std::uint64_t>(whole);
      plan.residual_mass = mass - whole;
    }
    groups_.push_back(std::move(plan));
  }
}

std::uint64_t DrawPlan::total_draws() const {
  std::uint64_t total = 0;
  for (const auto& g : groups_) total += g.full_draws + 1;
  return total;
}

namespace {

std::size_t draw_member(const GroupDrawPlan& plan, Rng& rng) {
  const double target = rng.uniform() * plan.cumulative.back();
  auto it = std::upper_bound(plan.cumulative.begin(), plan.cumulative.end(), target);
  if (it == plan.cumulative.end()) --it;
  return plan.group->members[static_cast<std::size_t>(it - plan.cumulative.begin())];
}

}  // namespace

void DrawPlan::draw(Rng& rng, std::vector<std::size_t>& out) const {
  out.clear();
  for (const auto& plan : groups_) {
    // S_q = 0 makes every draw probability 0/0 := 0.
    if (plan.weight_sum <= 0.0) continue;
    for (std::uint64_t k = 0; k < plan.full_draws; ++k) out.push_back(draw_member(plan, rng));
    if (rng.uniform() < plan.residual_mass) out.push_back(draw_member(plan, rng));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

Selection sample_selection(std::span<const double> w, const Partition& partition,
                           const ActionSet& action_set, Rng& rng) {
  if (w.size() != action_set.size() || partition.num_actions() != action_set.size()) {
    throw PreconditionError("sample_selection: weight vector length does not match the action set");
  }
  if (!is_feasible(w, action_set.energies(), 1e-9)) {
    throw PreconditionError("sample_selection: weight vector is outside the feasible polytope");
  }
  DrawPlan plan(w, partition);
  std::vector<std::size_t> drawn;
  plan.draw(rng, drawn);
  return Selection(std::move(drawn), action_set);
}

ProbabilityBounds analytic_selection_bounds(std::span<const double> w, std::size_t i, double delta) {
  const double x = delta * w[i];
  return {-std::expm1(-x), x};
}

double analytic_intersection_lower_bound(std::span<const double> w, std::span<const std::size_t> subset,
                                         double delta) {
  double sum = 0.0;
  for (std::size_t i : subset) sum += w[i];
  return -std::expm1(-delta * sum);
}

}  // namespace maxhedge
