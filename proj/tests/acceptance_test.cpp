// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "maxhedge/core_model.hpp"
#include "maxhedge/environments.hpp"
#include "maxhedge/harness.hpp"
#include "maxhedge/oracles.hpp"
#include "maxhedge/projection.hpp"
#include "maxhedge/sampler.hpp"
#include "maxhedge/surrogate.hpp"
#include "test_support.hpp"

namespace {

using namespace maxhedge;
using maxhedge::testing::random_energies;
using maxhedge::testing::random_feasible_weights;
using maxhedge::testing::random_trial;
using maxhedge::testing::uniform;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double seconds, const Outcome& o) {
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run(int id, const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0 && seconds > budget_seconds) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(budget_seconds)) + "s budget";
  }
  report(id, name, seconds, o);
}

std::string fmt(const char* pattern, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, args...);
  return buffer;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

Outcome feasibility() {
  Rng rng(1001);
  std::size_t violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 100'000; ++k) {
    const std::size_t n = 1 + rng() % 50;
    const auto z = random_energies(rng, n, 0.49);
    const ActionSet set(z);
    const auto partition = build_partition(set);
    const auto w = random_feasible_weights(rng, z);
    Rng draw = Rng::stream(rng(), 0);
    const auto s = sample_selection(w, partition, set, draw);
    double energy = 0.0;
    for (std::size_t i : s.actions()) energy += z[i];
    worst = std::max(worst, energy);
    if (energy > 1.0 + 1e-12) ++violations;
  }
  return {violations == 0, fmt("%zu violations in 1e5 selections, largest energy %.6f", violations, worst)};
}

struct SamplerInstance {
  std::vector<double> z;
  std::vector<double> w;
};

std::vector<SamplerInstance> sampler_instances() {
  Rng rng(2002);
  std::vector<SamplerInstance> out;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 8);
    auto z = random_energies(rng, n, 0.49);
    // Small energies let one class carry several full draws.
    if (k % 5 == 4) {
      for (double& v : z) v *= 0.1;
    }
    auto w = random_feasible_weights(rng, z);
    out.push_back({std::move(z), std::move(w)});
  }
  return out;
}

// Criteria 2 and 3 share one simulation pass per instance.
struct ProbabilityCheck {
  Outcome sandwich;
  Outcome intersection;
};

ProbabilityCheck probability_checks() {
  constexpr std::size_t kSamples = 1'000'000;
  const double sigma = 0.5 / std::sqrt(static_cast<double>(kSamples));
  std::size_t sandwich_fail = 0, bound_fail = 0, exact_fail = 0, checked_sets = 0;
  double worst_sandwich = -1e9, worst_exact = 0.0;

  Rng rng(3003);
  for (const auto& inst : sampler_instances()) {
    const std::size_t n = inst.z.size();
    const ActionSet set(inst.z);
    const auto partition = build_partition(set);

    std::vector<std::uint32_t> subsets;
    for (int k = 0; k < 20; ++k) {
      std::uint32_t mask = static_cast<std::uint32_t>(rng() % ((1u << n) - 1)) + 1;
      subsets.push_back(mask);
    }
    std::vector<std::size_t> counts(n, 0), hits(subsets.size(), 0);
    Rng draw(rng());
    for (std::size_t s = 0; s < kSamples; ++s) {
      std::uint32_t drawn = 0;
      const Selection selection = sample_selection(inst.w, partition, set, draw);
      for (std::size_t i : selection.actions()) {
        ++counts[i];
        drawn |= 1u << i;
      }
      for (std::size_t k = 0; k < subsets.size(); ++k) hits[k] += (drawn & subsets[k]) != 0;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const double f = static_cast<double>(counts[i]) / kSamples;
      const auto b = analytic_selection_bounds(inst.w, i, set.delta());
      const double margin = std::min(f - (b.lower - 3 * sigma), (b.upper + 3 * sigma) - f);
      worst_sandwich = std::max(worst_sandwich, -margin / sigma);
      if (margin < 0) ++sandwich_fail;
    }

    const auto draws = enumerate_draws(inst.w, set);
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (subsets[k] & (1u << i)) members.push_back(i);
      }
      const double f = static_cast<double>(hits[k]) / kSamples;
      const double lower = analytic_intersection_lower_bound(inst.w, members, set.delta());
      const double exact = exact_intersection_probability(draws, members);
      if (f < lower - 3 * sigma) ++bound_fail;
      worst_exact = std::max(worst_exact, std::abs(f - exact) / sigma);
      if (std::abs(f - exact) > 4 * sigma) ++exact_fail;
      ++checked_sets;
    }
  }
  ProbabilityCheck out;
  out.sandwich = {sandwich_fail == 0,
                  fmt("%zu of the per-action frequencies outside the 3-sigma sandwich (closest approach %.2f sigma "
                      "inside)",
                      sandwich_fail, -worst_sandwich)};
  out.intersection = {bound_fail == 0 && exact_fail == 0,
                      fmt("%zu sets: %zu below bound - 3 sigma, %zu off the exact product form by > 4 sigma "
                          "(max %.2f sigma)",
                          checked_sets, bound_fail, exact_fail, worst_exact)};
  return out;
}

struct GradientInstance {
  TrialData trial;
  std::vector<double> w;
  double delta;
};

std::vector<GradientInstance> gradient_instances() {
  Rng rng(4004);
  const double deltas[] = {0.01, 0.25, 1.0};
  std::vector<GradientInstance> out;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 8;
    auto trial = random_trial(rng, n, 2.0, 1.0);
    std::vector<double> w(n);
    for (double& x : w) x = uniform(rng, 0.0, 1.0);
    // Some coordinates on the boundary of the orthant.
    if (k % 4 == 0) w[rng() % n] = 0.0;
    out.push_back({std::move(trial), std::move(w), deltas[k % 3]});
  }
  return out;
}

Outcome gradient_correctness() {
  double worst = 0.0;
  for (const auto& inst : gradient_instances()) {
    const auto g = surrogate_gradient(inst.w, inst.trial, inst.delta);
    const auto fd = finite_diff_gradient(
        [&](std::span<const double> x) { return surrogate_value(x, inst.trial, inst.delta); }, inst.w, 1e-5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(g[i] - fd[i]) / std::max(std::abs(g[i]), 1.0));
    }
  }
  return {worst <= 1e-6, fmt("max relative error %.3e over 200 instances (limit 1e-6)", worst)};
}

Outcome gradient_norm_bound() {
  std::size_t fail = 0;
  double tightest = 0.0;
  for (const auto& inst : gradient_instances()) {
    const auto g = surrogate_gradient(inst.w, inst.trial, inst.delta);
    double sq = 0.0;
    for (double x : g) sq += x * x;
    double r_hat = 0.0, c_hat = 0.0;
    for (double r : inst.trial.rewards()) r_hat = std::max(r_hat, r);
    for (double c : inst.trial.costs()) c_hat = std::max(c_hat, std::abs(c));
    const double bound = static_cast<double>(g.size()) * inst.delta * inst.delta * (r_hat + c_hat) * (r_hat + c_hat);
    if (!(sq <= bound)) ++fail;
    if (bound > 0) tightest = std::max(tightest, sq / bound);
  }
  return {fail == 0, fmt("%zu violations; largest ||g||^2 / bound = %.4f", fail, tightest)};
}

Outcome convexity() {
  Rng rng(5005);
  std::size_t fail = 0;
  double worst = -1e9;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng() % 8;
    const double delta = uniform(rng, 0.01, 1.0);
    const auto trial = random_trial(rng, n, 2.0, 1.0);
    std::vector<double> a(n), b(n), m(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = uniform(rng, 0.0, 2.0);
      b[i] = uniform(rng, 0.0, 2.0);
      m[i] = 0.5 * (a[i] + b[i]);
    }
    const double gap = surrogate_value(m, trial, delta) -
                       0.5 * (surrogate_value(a, trial, delta) + surrogate_value(b, trial, delta));
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++fail;
  }
  return {fail == 0, fmt("%zu failures in 1000 midpoint checks; largest F(m) - mean = %.3e", fail, worst)};
}

Outcome profit_floor() {
  Rng rng(6006);
  std::size_t fail = 0;
  double worst = 1e9;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng() % 8;
    const auto z = random_energies(rng, n, 0.49);
    const ActionSet set(z);
    const auto w = random_feasible_weights(rng, z);
    const auto trial = random_trial(rng, n, 2.0, 1.0);
    const double gap = exact_expected_profit(w, set, trial) + surrogate_value(w, trial, set.delta());
    worst = std::min(worst, gap);
    if (gap < -1e-10) ++fail;
  }
  return {fail == 0, fmt("%zu violations in 500 instances; smallest E[L] + F(w) = %.3e", fail, worst)};
}

Outcome projection_optimality() {
  Rng rng(7007);
  std::size_t grid_fail = 0, consistency_fail = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    // The grid is exhaustive, so its resolution shrinks with the dimension to keep it tractable.
    const double res = n <= 2 ? 1e-4 : n == 3 ? 1e-3 : 5e-3;
    const auto z = random_energies(rng, n, 1.0);
    std::vector<double> y(n);
    for (double& v : y) v = uniform(rng, -0.5, 1.5);
    const auto solver = project_onto_feasible(y, z).x;
    const auto grid = grid_projection(y, z, res);
    const double ds = distance(solver, y), dg = distance(grid, y);
    if (ds > dg + static_cast<double>(n) * 1e-4) ++grid_fail;
    // The grid can't beat the exact projection by more than one cell diagonal either way.
    if (dg > ds + std::sqrt(static_cast<double>(n)) * res + 1e-12) ++consistency_fail;
  }

  std::size_t idem_fail = 0, feas_fail = 0;
  for (int k = 0; k < 10'000; ++k) {
    const std::size_t n = 1 + rng() % 50;
    const auto z = random_energies(rng, n, 1.0);
    std::vector<double> y(n);
    for (double& v : y) v = uniform(rng, -2.0, 3.0);
    const auto once = project_onto_feasible(y, z).x;
    if (!is_feasible(once, z, 1e-9)) ++feas_fail;
    const auto twice = project_onto_feasible(once, z).x;
    if (distance(once, twice) > 1e-9) ++idem_fail;
  }
  return {grid_fail == 0 && consistency_fail == 0 && idem_fail == 0 && feas_fail == 0,
          fmt("grid: %zu/200 worse than oracle + n*1e-4, %zu inconsistent; 1e4 random y: %zu infeasible, %zu "
              "not idempotent",
              grid_fail, consistency_fail, feas_fail, idem_fail)};
}

Outcome regret_bound() {
  Outcome out;
  const EnvironmentKind kinds[] = {EnvironmentKind::knapsack_01, EnvironmentKind::facility_location,
                                   EnvironmentKind::knapsack_median};
  for (auto kind : kinds) {
    ExperimentConfig config;
    config.environment.kind = kind;
    config.environment.n = 8;
    config.environment.T = 500;
    config.environment.seed = 17;
    config.seeds.clear();
    for (std::uint64_t s = 1; s <= 100; ++s) config.seeds.push_back(s);
    config.write_traces = false;
    config.write_stream = false;
    const auto stream = generate(config.environment);
    const auto r = run_on_stream(config, stream);
    const bool ok = r.bound_checked && r.bound_satisfied;
    out.pass = out.pass && ok;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += fmt("%s mean %.3f (SE %.3f) vs comparator %.3f - slack %.3f -> %s", std::string(kind_name(kind)).c_str(),
                      r.mean_profit, r.std_error, r.comparator_total, r.slack, ok ? "holds" : "VIOLATED");
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "maxhedge_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0, mismatched = 0;
  const EnvironmentKind kinds[] = {EnvironmentKind::knapsack_01, EnvironmentKind::facility_location,
                                   EnvironmentKind::knapsack_median, EnvironmentKind::random_adversarial};
  for (auto kind : kinds) {
    ExperimentConfig config;
    config.environment.kind = kind;
    config.environment.n = 8;
    config.environment.T = 200;
    config.seeds = {3, 1, 4};
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      config.output_dir = (root / std::string(kind_name(kind)) / std::to_string(rep)).string();
      // The second run uses worker threads; outputs must not depend on scheduling.
      config.jobs = rep == 0 ? 1 : 3;
      run_experiment(config);
      dirs.emplace_back(config.output_dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const auto twin = dirs[1] / entry.path().filename();
      if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++mismatched;
    }
  }
  fs::remove_all(root);
  return {mismatched == 0 && files > 0, fmt("%zu output files compared across repeated runs, %zu differ", files, mismatched)};
}

}  // namespace

int main() {
  run(1, "budget feasibility", 30.0, feasibility);
  {
    const auto start = std::chrono::steady_clock::now();
    ProbabilityCheck checks;
    try {
      checks = probability_checks();
    } catch (const std::exception& e) {
      checks.sandwich = checks.intersection = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > 120.0) {
      checks.sandwich.pass = false;
      checks.sandwich.detail += "; over the 120s budget";
    }
    report(2, "selection-probability sandwich", seconds, checks.sandwich);
    report(3, "intersection lower bound", seconds, checks.intersection);
  }
  run(4, "gradient correctness", 0.0, gradient_correctness);
  run(5, "gradient-norm bound", 0.0, gradient_norm_bound);
  run(6, "surrogate convexity", 0.0, convexity);
  run(7, "expected-profit floor", 0.0, profit_floor);
  run(8, "projection optimality", 0.0, projection_optimality);
  run(9, "regret bound", 300.0, regret_bound);
  run(10, "determinism", 0.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
