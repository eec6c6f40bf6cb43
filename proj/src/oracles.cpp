#include "maxhedge/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "maxhedge/errors.hpp"
#include "maxhedge/rng.hpp"
#include "maxhedge/sampler.hpp"

namespace maxhedge {

double discounted_total(std::span<const std::size_t> subset, std::span<const TrialData> trials,
                        double alpha, double delta) {
  double total = 0.0;
  for (const auto& trial : trials) total += discounted_profit(subset, trial, alpha, delta);
  return total;
}

namespace {

struct ComparatorSearch {
  std::span<const TrialData> trials;
  std::span<const double> z;
  double alpha = 0.0;
  std::size_t n = 0;
  std::vector<double> linear;          // per-action total of -(alpha c- + delta c+)
  std::vector<double> optimistic_tail; // sum_{j >= i} max(0, linear_j + alpha sum_t r_j^t)
  std::vector<std::vector<double>> best_reward_at_depth;
  std::vector<std::size_t> current;
  std::vector<std::size_t> best_subset;
  double best_value = 0.0;

  void explore(std::size_t start, std::size_t depth, double energy, double linear_sum) {
    const auto& maxima = best_reward_at_depth[depth];
    double reward_sum = 0.0;
    for (double m : maxima) reward_sum += m;
    const double value = alpha * reward_sum + linear_sum;
    // Subsets are visited in lexicographic order, so a strict improvement keeps the smallest tie.
    if (value > best_value) {
      best_value = value;
      best_subset = current;
    }
    if (start >= n) return;
    const double slack = 1e-9 * (1.0 + std::abs(best_value));
    if (value + optimistic_tail[start] < best_value - slack) return;

    for (std::size_t j = start; j < n; ++j) {
      if (energy + z[j] > 1.0 + kBudgetSlack) continue;
      auto& next = best_reward_at_depth[depth + 1];
      for (std::size_t t = 0; t < trials.size(); ++t) next[t] = std::max(maxima[t], trials[t].rewards()[j]);
      current.push_back(j);
      explore(j + 1, depth + 1, energy + z[j], linear_sum + linear[j]);
      current.pop_back();
    }
  }
};

}  // namespace

ComparatorResult best_fixed_subset(std::span<const TrialData> trials, const ActionSet& action_set,
                                   double alpha, double delta) {
  const std::size_t n = action_set.size();
  if (n > kMaxComparatorActions) {
    throw CapacityError("best_fixed_subset enumerates at most " + std::to_string(kMaxComparatorActions) +
                        " actions, got " + std::to_string(n));
  }
  for (const auto& trial : trials) {
    if (trial.size() != n) throw DimensionError("best_fixed_subset: trial length differs from n");
  }

  ComparatorSearch search;
  search.trials = trials;
  search.z = action_set.energies();
  search.alpha = alpha;
  search.n = n;
  search.linear.assign(n, 0.0);
  std::vector<double> reward_totals(n, 0.0);
  for (const auto& trial : trials) {
    for (std::size_t i = 0; i < n; ++i) {
      search.linear[i] -= alpha * trial.costs_neg()[i] + delta * trial.costs_pos()[i];
      reward_totals[i] += trial.rewards()[i];
    }
  }
  search.optimistic_tail.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    search.optimistic_tail[i] =
        search.optimistic_tail[i + 1] + std::max(0.0, search.linear[i] + alpha * reward_totals[i]);
  }
  search.best_reward_at_depth.assign(n + 1, std::vector<double>(trials.size(), 0.0));
  search.explore(0, 0, 0.0, 0.0);

  ComparatorResult result;
  result.subset = search.best_subset;
  result.discounted_total = discounted_total(result.subset, trials, alpha, delta);
  double energy = 0.0;
  for (std::size_t i : result.subset) energy += action_set.energy(i);
  result.feasible = energy <= 1.0 + kBudgetSlack;
  return result;
}

std::vector<DrawDistribution> enumerate_draws(std::span<const double> w, const ActionSet& action_set) {
  const auto z = action_set.energies();
  const double beta = action_set.beta();
  const double tau = action_set.tau();
  const double delta = action_set.delta();
  if (w.size() != z.size()) throw DimensionError("enumerate_draws: length mismatch");

  // Class 0 collects zero-energy actions; class q >= 1 is (tau^q beta, tau^(q-1) beta].
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < z.size(); ++i) {
    int q = 0;
    if (z[i] > 0.0) {
      q = 1;
      while (z[i] <= std::pow(tau, q) * beta) ++q;
    }
    classes[q].push_back(i);
  }

  std::vector<DrawDistribution> draws;
  for (const auto& [q, members] : classes) {
    double total = 0.0;
    for (std::size_t i : members) total += w[i];
    if (total <= 0.0) continue;
    const double mass = delta * total;
    const double whole = std::floor(mass);
    DrawDistribution full{members, {}};
    for (std::size_t i : members) full.probs.push_back(w[i] / total);
    for (double k = 0; k < whole; k += 1.0) draws.push_back(full);
    DrawDistribution residual{members, {}};
    for (std::size_t i : members) residual.probs.push_back((mass - whole) * w[i] / total);
    draws.push_back(std::move(residual));
  }
  return draws;
}

double exact_intersection_probability(std::span<const DrawDistribution> draws,
                                      std::span<const std::size_t> subset) {
  double miss = 1.0;
  for (const auto& d : draws) {
    double hit = 0.0;
    for (std::size_t k = 0; k < d.members.size(); ++k) {
      if (std::find(subset.begin(), subset.end(), d.members[k]) != subset.end()) hit += d.probs[k];
    }
    miss *= 1.0 - hit;
  }
  return 1.0 - miss;
}

double exact_expected_profit(std::span<const double> w, const ActionSet& action_set, const TrialData& trial) {
  const std::size_t n = action_set.size();
  if (trial.size() != n) throw DimensionError("exact_expected_profit: length mismatch");
  const auto draws = enumerate_draws(w, action_set);

  // probability[d][i] = P(draw d returns action i)
  std::vector<std::vector<double>> probability(draws.size(), std::vector<double>(n, 0.0));
  for (std::size_t d = 0; d < draws.size(); ++d) {
    for (std::size_t k = 0; k < draws[d].members.size(); ++k) {
      probability[d][draws[d].members[k]] = draws[d].probs[k];
    }
  }

  const auto r = trial.rewards();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r[a] != r[b] ? r[a] > r[b] : a < b;
  });

  // E[max r] = sum_j (r_{s_j} - r_{s_{j+1}}) P(S meets {s_1..s_j}).
  double expected_reward = 0.0;
  std::vector<double> prefix_hit(draws.size(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double miss = 1.0;
    for (std::size_t d = 0; d < draws.size(); ++d) {
      prefix_hit[d] += probability[d][order[j]];
      miss *= 1.0 - prefix_hit[d];
    }
    const double next = j + 1 < n ? r[order[j + 1]] : 0.0;
    expected_reward += (r[order[j]] - next) * (1.0 - miss);
  }

  double expected_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double miss = 1.0;
    for (std::size_t d = 0; d < draws.size(); ++d) miss *= 1.0 - probability[d][i];
    expected_cost += trial.costs()[i] * (1.0 - miss);
  }
  return expected_reward - expected_cost;
}

SelectionEstimate estimate_selection_probs(std::span<const double> w, const ActionSet& action_set,
                                           std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("estimate_selection_probs needs at least one sample");
  const Partition partition = build_partition(action_set);
  const DrawPlan plan(w, partition);
  Rng rng(seed);
  std::vector<std::size_t> hits(action_set.size(), 0);
  std::vector<std::size_t> drawn;
  for (std::size_t s = 0; s < samples; ++s) {
    plan.draw(rng, drawn);
    for (std::size_t i : drawn) ++hits[i];
  }
  SelectionEstimate est;
  est.samples = samples;
  const double count = static_cast<double>(samples);
  for (std::size_t h : hits) {
    const double p = static_cast<double>(h) / count;
    est.frequency.push_back(p);
    est.std_error.push_back(std::sqrt(p * (1.0 - p) / count));
  }
  return est;
}

std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> w, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite_diff_gradient: step must be positive");
  std::vector<double> probe(w.begin(), w.end());
  std::vector<double> grad(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double base = w[i];
    if (base >= h) {
      probe[i] = base + h;
      const double up = f(probe);
      probe[i] = base - h;
      const double down = f(probe);
      grad[i] = (up - down) / (2.0 * h);
    } else {
      const double f0 = f(probe);
      probe[i] = base + h;
      const double f1 = f(probe);
      probe[i] = base + 2.0 * h;
      const double f2 = f(probe);
      grad[i] = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
    }
    probe[i] = base;
  }
  return grad;
}

std::vector<double> grid_projection(std::span<const double> y, std::span<const double> z, double resolution) {
  const std::size_t n = y.size();
  if (n == 0 || n > 4) throw CapacityError("grid_projection supports 1 to 4 coordinates");
  if (z.size() != n) throw DimensionError("grid_projection: length mismatch");
  const double steps_real = std::round(1.0 / resolution);
  if (!(resolution > 0.0) || std::abs(steps_real * resolution - 1.0) > 1e-9) {
    throw PreconditionError("grid_projection: resolution must divide 1");
  }
  const long steps = static_cast<long>(steps_real);
  auto grid = [&](long k) { return static_cast<double>(k) / steps_real; };

  std::vector<double> best(n, 0.0);
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<long> idx(n - 1, 0);
  std::vector<double> point(n, 0.0);

  // Odometer over the first n-1 coordinates; the last one is chosen optimally in closed form.
  while (true) {
    double used = 0.0;
    double dist = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      point[i] = grid(idx[i]);
      used += z[i] * point[i];
      dist += (point[i] - y[i]) * (point[i] - y[i]);
    }
    if (used <= 1.0) {
      const std::size_t last = n - 1;
      long cap = steps;
      if (z[last] > 0.0) {
        cap = std::min<long>(steps, static_cast<long>(std::floor((1.0 - used) / z[last] * steps_real)) + 1);
        while (cap >= 0 && used + z[last] * grid(cap) > 1.0) --cap;
      }
      if (cap >= 0) {
        const long k = std::clamp<long>(std::lround(y[last] * steps_real), 0, cap);
        point[last] = grid(k);
        const double total = dist + (point[last] - y[last]) * (point[last] - y[last]);
        if (total < best_dist) {
          best_dist = total;
          best = point;
        }
      }
    }
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] > steps) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return best;
}

}  // namespace maxhedge
