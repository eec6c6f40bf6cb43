// maxhedge: run, replay and self-check the online subset-selection learner.
//
// Exit codes: 0 success, 1 validation error (bad config, malformed stream, failed check),
// 2 runtime or I/O error.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxhedge/errors.hpp"
#include "maxhedge/harness.hpp"
#include "maxhedge/kernels.hpp"
#include "maxhedge/oracles.hpp"
#include "maxhedge/projection.hpp"
#include "maxhedge/rng.hpp"
#include "maxhedge/sampler.hpp"
#include "maxhedge/surrogate.hpp"

namespace {

using namespace maxhedge;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config;
  std::string kernels = "auto";
};

ExperimentConfig resolve_config(const GlobalOptions& global) {
  if (global.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig config = load_config(global.config);
  if (global.seed) config.seeds = {*global.seed};
  if (global.out) config.output_dir = *global.out;
  return config;
}

void print_report(const RunReport& report) {
  std::cout << "environment     " << report.kind << " (n=" << report.n << ", T=" << report.T << ")\n";
  if (report.large_beta_mode) {
    std::cout << "mode            large-energy wrapper [experimental: no regret guarantee]\n";
  }
  std::cout << "alpha, delta    " << report.alpha << ", " << report.delta << '\n';
  std::cout << "r_hat, c_hat    " << report.r_hat << ", " << report.c_hat << '\n';
  std::cout << "seeds           " << report.seeds.size() << '\n';
  std::cout << "mean profit     " << report.mean_profit << " (SE " << report.std_error << ")\n";
  if (report.bound_checked) {
    std::cout << "comparator      " << report.comparator_total << " over {";
    for (std::size_t k = 0; k < report.comparator_subset.size(); ++k) {
      std::cout << (k ? "," : "") << report.comparator_subset[k];
    }
    std::cout << "}\n";
    std::cout << "slack           " << report.slack << '\n';
    std::cout << "bound           " << (report.bound_satisfied ? "satisfied" : "VIOLATED") << '\n';
  }
}

std::vector<double> random_energies(Rng& rng, std::size_t n, double beta_max) {
  std::vector<double> z(n);
  for (double& x : z) x = beta_max * rng.uniform();
  return z;
}

std::vector<double> random_feasible(Rng& rng, std::span<const double> z) {
  std::vector<double> y(z.size());
  for (double& v : y) v = 2.0 * rng.uniform();
  return project_onto_feasible(y, z).x;
}

int run_probcheck(const GlobalOptions& global, std::size_t n, std::size_t samples, std::size_t instances,
                  double beta_max) {
  Rng rng(global.seed.value_or(1));
  const double sigma = 0.5 / std::sqrt(static_cast<double>(samples));
  std::size_t failures = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const ActionSet set(random_energies(rng, n, beta_max));
    const auto w = random_feasible(rng, set.energies());
    const auto est = estimate_selection_probs(w, set, samples, rng());
    for (std::size_t i = 0; i < n; ++i) {
      const auto [lo, hi] = analytic_selection_bounds(w, i, set.delta());
      const bool ok = est.frequency[i] >= lo - 3 * sigma && est.frequency[i] <= hi + 3 * sigma;
      failures += ok ? 0 : 1;
      std::cout << "instance " << k << " action " << i << "  lower " << lo << "  freq " << est.frequency[i]
                << "  upper " << hi << (ok ? "" : "  FAIL") << '\n';
    }
  }
  std::cout << (failures == 0 ? "probcheck passed" : "probcheck FAILED") << " (" << failures
            << " violations)\n";
  return failures == 0 ? 0 : kExitValidation;
}

int run_gradcheck(const GlobalOptions& global, std::size_t instances, std::size_t max_n, double h,
                  double tolerance) {
  Rng rng(global.seed.value_or(1));
  double worst = 0.0;
  std::size_t norm_violations = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % max_n);
    const double delta = std::array{0.01, 0.25, 1.0}[k % 3];
    std::vector<double> r(n), c(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = 5.0 * rng.uniform();
      c[i] = 4.0 * rng.uniform() - 2.0;
      w[i] = rng.uniform();
    }
    const TrialData trial(r, c);
    const auto g = surrogate_gradient(w, trial, delta);
    const auto fd = finite_diff_gradient(
        [&](std::span<const double> x) { return surrogate_value(x, trial, delta); }, w, h);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(g[i] - fd[i]) / std::max(std::abs(g[i]), 1.0));
      norm_sq += g[i] * g[i];
    }
    const auto [r_hat, c_hat] = stream_maxima(TrialStream{ActionSet(std::vector<double>(n, 0.0)), {trial}});
    if (norm_sq > static_cast<double>(n) * delta * delta * (r_hat + c_hat) * (r_hat + c_hat)) ++norm_violations;
  }
  const bool ok = worst <= tolerance && norm_violations == 0;
  std::cout << "max relative error " << worst << " (tolerance " << tolerance << ")\n"
            << "gradient-norm bound violations " << norm_violations << '\n'
            << (ok ? "gradcheck passed" : "gradcheck FAILED") << '\n';
  return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online budgeted subset selection: experiments and self-checks"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed (overrides the config's seed list for run/replay)");
  app.add_option("--out", global.out, "Output directory (overrides the config)");
  app.add_option("--config", global.config, "Experiment config (JSON)");
  app.add_option("--kernels", global.kernels, "Kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  auto* run = app.add_subcommand("run", "Generate the configured environment and run every seed");

  auto* replay_cmd = app.add_subcommand("replay", "Run the configured seeds over a saved stream file");
  std::string stream_path;
  replay_cmd->add_option("--stream", stream_path, "Stream file written by 'run'")->required();

  auto* probcheck = app.add_subcommand("probcheck", "Monte Carlo selection frequencies vs analytic bounds");
  std::size_t pc_n = 6, pc_samples = 1000000, pc_instances = 5;
  double pc_beta = 0.45;
  probcheck->add_option("--n", pc_n, "Actions per instance")->check(CLI::Range(1, 64));
  probcheck->add_option("--samples", pc_samples, "Samples per instance")->check(CLI::PositiveNumber);
  probcheck->add_option("--instances", pc_instances, "Random instances");
  probcheck->add_option("--beta-max", pc_beta, "Largest energy")->check(CLI::Range(0.0, 0.49));

  auto* gradcheck = app.add_subcommand("gradcheck", "Analytic surrogate gradient vs finite differences");
  std::size_t gc_instances = 200, gc_max_n = 8;
  double gc_h = 1e-5, gc_tol = 1e-6;
  gradcheck->add_option("--instances", gc_instances, "Random instances");
  gradcheck->add_option("--max-n", gc_max_n, "Largest action count")->check(CLI::Range(1, 64));
  gradcheck->add_option("--step", gc_h, "Finite-difference step h")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tol", gc_tol, "Relative error tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    kernels::select(kernels::parse_isa(global.kernels));
    if (*run) {
      print_report(run_experiment(resolve_config(global)));
    } else if (*replay_cmd) {
      print_report(replay(stream_path, resolve_config(global)));
    } else if (*probcheck) {
      return run_probcheck(global, pc_n, pc_samples, pc_instances, pc_beta);
    } else if (*gradcheck) {
      return run_gradcheck(global, gc_instances, gc_max_n, gc_h, gc_tol);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
