#include "maxhedge/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "maxhedge/errors.hpp"
#include "maxhedge/rng.hpp"
#include "maxhedge/text_format.hpp"

namespace maxhedge {

namespace {

// Sub-stream 0 is used for the fixed instance data, stream t for trial t.
constexpr std::uint64_t kSetupStream = 0;

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Uniform on (0, hi].
double positive_energy(Rng& rng, double hi) { return hi * (1.0 - rng.uniform()); }

std::vector<std::vector<double>> random_points(Rng& rng, std::size_t count, std::size_t dim) {
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& x : p) x = rng.uniform();
  }
  return pts;
}

std::vector<double> location_rewards(Rng& rng, const std::vector<std::vector<double>>& sites,
                                     const EnvironmentSpec& spec) {
  std::vector<double> user(spec.dimension);
  for (double& x : user) x = rng.uniform();
  std::vector<double> r(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) r[i] = distance_reward(user, sites[i], spec.r_max);
  return r;
}

void require_kind(const EnvironmentSpec& spec, EnvironmentKind kind) {
  if (spec.kind != kind) {
    throw ConfigError("generator for " + std::string(kind_name(kind)) + " called with kind " +
                      std::string(kind_name(spec.kind)));
  }
  const auto problems = spec.validate();
  if (!problems.empty()) {
    std::string message = "invalid environment spec:";
    for (const auto& p : problems) message += "\n  - " + p;
    throw ConfigError(message);
  }
}

}  // namespace

std::string_view kind_name(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::facility_location:
      return "facility_location";
    case EnvironmentKind::knapsack_median:
      return "knapsack_median";
    case EnvironmentKind::knapsack_01:
      return "knapsack_01";
    case EnvironmentKind::random_adversarial:
      return "random_adversarial";
  }
  return "unknown";
}

EnvironmentKind parse_kind(std::string_view name) {
  for (auto kind : {EnvironmentKind::facility_location, EnvironmentKind::knapsack_median,
                    EnvironmentKind::knapsack_01, EnvironmentKind::random_adversarial}) {
    if (kind_name(kind) == name) return kind;
  }
  throw ConfigError("unknown environment kind '" + std::string(name) + "'");
}

std::vector<std::string> EnvironmentSpec::validate() const {
  std::vector<std::string> errors;
  if (n == 0) errors.emplace_back("n must be at least 1");
  if (T == 0) errors.emplace_back("T must be at least 1");
  if (dimension == 0) errors.emplace_back("dimension must be at least 1");
  if (!(r_max >= 0.0) || !std::isfinite(r_max)) errors.emplace_back("r_max must be finite and >= 0");
  if (!(cost_min >= 0.0) || !std::isfinite(cost_max) || cost_max < cost_min) {
    errors.emplace_back("cost range must satisfy 0 <= cost_min <= cost_max");
  }
  if (!(beta_max > 0.0 && beta_max <= 1.0)) errors.emplace_back("beta_max must lie in (0, 1]");
  if (!(value_max >= 0.0) || !std::isfinite(value_max)) errors.emplace_back("value_max must be finite and >= 0");
  if (!(c_hat >= 0.0) || !std::isfinite(c_hat)) errors.emplace_back("c_hat must be finite and >= 0");
  if (shift_blocks > T) errors.emplace_back("shift_blocks must not exceed T");
  return errors;
}

double distance_reward(std::span<const double> user, std::span<const double> site, double r_max) {
  double sq = 0.0;
  for (std::size_t k = 0; k < user.size(); ++k) {
    const double d = user[k] - site[k];
    sq += d * d;
  }
  return std::max(0.0, r_max - std::sqrt(sq));
}

TrialStream gen_facility_location(const EnvironmentSpec& spec) {
  require_kind(spec, EnvironmentKind::facility_location);
  Rng setup = Rng::stream(spec.seed, kSetupStream);
  const auto sites = random_points(setup, spec.n, spec.dimension);
  TrialStream out{ActionSet(std::vector<double>(spec.n, 0.0)), {}};
  out.trials.reserve(spec.T);
  for (std::size_t t = 1; t <= spec.T; ++t) {
    Rng rng = Rng::stream(spec.seed, t);
    auto r = location_rewards(rng, sites, spec);
    std::vector<double> c(spec.n);
    for (double& x : c) x = uniform(rng, spec.cost_min, spec.cost_max);
    out.trials.emplace_back(std::move(r), std::move(c));
  }
  return out;
}

TrialStream gen_knapsack_median(const EnvironmentSpec& spec) {
  require_kind(spec, EnvironmentKind::knapsack_median);
  Rng setup = Rng::stream(spec.seed, kSetupStream);
  const auto sites = random_points(setup, spec.n, spec.dimension);
  std::vector<double> z(spec.n);
  for (double& x : z) x = positive_energy(setup, spec.beta_max);
  TrialStream out{ActionSet(std::move(z)), {}};
  out.trials.reserve(spec.T);
  for (std::size_t t = 1; t <= spec.T; ++t) {
    Rng rng = Rng::stream(spec.seed, t);
    out.trials.emplace_back(location_rewards(rng, sites, spec), std::vector<double>(spec.n, 0.0));
  }
  return out;
}

TrialStream gen_knapsack_01(const EnvironmentSpec& spec) {
  require_kind(spec, EnvironmentKind::knapsack_01);
  Rng setup = Rng::stream(spec.seed, kSetupStream);
  std::vector<double> z(spec.n);
  for (double& x : z) x = positive_energy(setup, spec.beta_max);
  // Item i's value on a trial is uniform on [0, 2 mu_i] with mu_i in [0, value_max / 2].
  std::vector<double> mean(spec.n);
  for (double& m : mean) m = uniform(setup, 0.0, 0.5 * spec.value_max);
  TrialStream out{ActionSet(std::move(z)), {}};
  out.trials.reserve(spec.T);
  for (std::size_t t = 1; t <= spec.T; ++t) {
    Rng rng = Rng::stream(spec.seed, t);
    std::vector<double> c(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) c[i] = -uniform(rng, 0.0, 2.0 * mean[i]);
    out.trials.emplace_back(std::vector<double>(spec.n, 0.0), std::move(c));
  }
  return out;
}

TrialStream gen_random_adversarial(const EnvironmentSpec& spec) {
  require_kind(spec, EnvironmentKind::random_adversarial);
  Rng setup = Rng::stream(spec.seed, kSetupStream);
  std::vector<double> z(spec.n);
  for (double& x : z) x = uniform(setup, 0.0, spec.beta_max);
  const std::size_t first_favourite = static_cast<std::size_t>(setup() % spec.n);
  TrialStream out{ActionSet(std::move(z)), {}};
  out.trials.reserve(spec.T);
  for (std::size_t t = 1; t <= spec.T; ++t) {
    Rng rng = Rng::stream(spec.seed, t);
    std::vector<double> r(spec.n);
    if (spec.shift_blocks == 0) {
      for (double& x : r) x = uniform(rng, 0.0, spec.r_max);
    } else {
      // The favourite earns at least 3/4 r-hat, everyone else at most 1/2 r-hat.
      const std::size_t block = (t - 1) * spec.shift_blocks / spec.T;
      const std::size_t favourite = (first_favourite + block) % spec.n;
      for (std::size_t i = 0; i < spec.n; ++i) {
        r[i] = i == favourite ? uniform(rng, 0.75 * spec.r_max, spec.r_max)
                              : uniform(rng, 0.0, 0.5 * spec.r_max);
      }
    }
    std::vector<double> c(spec.n);
    for (double& x : c) x = uniform(rng, -spec.c_hat, spec.c_hat);
    out.trials.emplace_back(std::move(r), std::move(c));
  }
  return out;
}

TrialStream generate(const EnvironmentSpec& spec) {
  switch (spec.kind) {
    case EnvironmentKind::facility_location:
      return gen_facility_location(spec);
    case EnvironmentKind::knapsack_median:
      return gen_knapsack_median(spec);
    case EnvironmentKind::knapsack_01:
      return gen_knapsack_01(spec);
    case EnvironmentKind::random_adversarial:
      return gen_random_adversarial(spec);
  }
  throw ConfigError("unknown environment kind");
}

std::string check_pattern(const TrialStream& stream, EnvironmentKind kind) {
  const auto z = stream.action_set.energies();
  if (kind == EnvironmentKind::facility_location) {
    for (double zi : z) {
      if (zi != 0.0) return "facility_location requires every energy to be 0";
    }
  }
  for (std::size_t t = 0; t < stream.trials.size(); ++t) {
    const auto& trial = stream.trials[t];
    const std::string where = " on trial " + std::to_string(t + 1);
    for (std::size_t i = 0; i < trial.size(); ++i) {
      const double r = trial.rewards()[i];
      const double c = trial.costs()[i];
      switch (kind) {
        case EnvironmentKind::facility_location:
          if (c < 0.0) return "negative facility cost" + where;
          break;
        case EnvironmentKind::knapsack_median:
          if (c != 0.0) return "non-zero cost in knapsack_median" + where;
          break;
        case EnvironmentKind::knapsack_01:
          if (r != 0.0) return "non-zero reward in knapsack_01" + where;
          if (c > 0.0) return "positive cost in knapsack_01" + where;
          break;
        case EnvironmentKind::random_adversarial:
          break;
      }
    }
  }
  return {};
}

void write_stream(std::ostream& out, const TrialStream& stream) {
  const std::size_t n = stream.action_set.size();
  out << "stream," << n << ',' << stream.trials.size();
  for (double z : stream.action_set.energies()) out << ',' << format_double(z);
  out << '\n';
  for (std::size_t t = 0; t < stream.trials.size(); ++t) {
    out << t + 1;
    for (double r : stream.trials[t].rewards()) out << ',' << format_double(r);
    for (double c : stream.trials[t].costs()) out << ',' << format_double(c);
    out << '\n';
  }
}

void write_stream_file(const std::string& path, const TrialStream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_stream(out, stream);
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

std::vector<double> parse_fields(std::span<const std::string_view> fields, std::size_t line,
                                 const char* what) {
  std::vector<double> values;
  values.reserve(fields.size());
  for (auto f : fields) {
    auto v = parse_double(f);
    if (!v) throw ParseError("bad " + std::string(what) + " value '" + std::string(f) + "'", line);
    values.push_back(*v);
  }
  return values;
}

}  // namespace

TrialStream read_stream(std::istream& in) {
  std::string text;
  std::size_t line_no = 1;
  if (!std::getline(in, text)) throw ParseError("missing stream preamble", line_no);
  const auto head = split(text, ',');
  if (head.size() < 3 || head[0] != "stream") {
    throw ParseError("preamble must read 'stream,<n>,<T>,<z...>'", line_no);
  }
  const auto n = parse_unsigned(head[1]);
  const auto T = parse_unsigned(head[2]);
  if (!n || *n == 0 || !T) throw ParseError("bad n or T in preamble", line_no);
  if (head.size() != 3 + *n) {
    throw ParseError("preamble lists " + std::to_string(head.size() - 3) + " energies, expected " +
                         std::to_string(*n),
                     line_no);
  }
  auto z = parse_fields(std::span(head).subspan(3), line_no, "energy");
  std::optional<ActionSet> set;
  try {
    set.emplace(std::move(z));
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }

  TrialStream stream{std::move(*set), {}};
  stream.trials.reserve(*T);
  for (std::size_t t = 1; t <= *T; ++t) {
    ++line_no;
    if (!std::getline(in, text)) {
      throw ParseError("stream ends after " + std::to_string(t - 1) + " of " + std::to_string(*T) +
                           " trials",
                       line_no);
    }
    const auto fields = split(text, ',');
    if (fields.size() != 1 + 2 * *n) {
      throw ParseError("expected " + std::to_string(1 + 2 * *n) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto index = parse_unsigned(fields[0]);
    if (!index || *index != t) throw ParseError("expected trial index " + std::to_string(t), line_no);
    auto r = parse_fields(std::span(fields).subspan(1, *n), line_no, "reward");
    auto c = parse_fields(std::span(fields).subspan(1 + *n), line_no, "cost");
    try {
      stream.trials.emplace_back(std::move(r), std::move(c));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty()) throw ParseError("unexpected content after the last trial", line_no);
  }
  return stream;
}

TrialStream read_stream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stream file '" + path + "'");
  try {
    return read_stream(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace maxhedge
