#include "maxhedge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "maxhedge/errors.hpp"
#include "maxhedge/oracles.hpp"
#include "maxhedge/text_format.hpp"

namespace maxhedge {

using nlohmann::json;

namespace {

// Reads typed fields out of one JSON object, recording problems instead of throwing so the caller
// can report every violation at once.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string where, std::vector<std::string>& errors)
      : object_(object), where_(std::move(where)), errors_(errors) {
    if (!object_.is_object()) errors_.push_back(where_ + " must be a JSON object");
  }

  ~ObjectReader() {
    if (!object_.is_object()) return;
    for (const auto& item : object_.items()) {
      if (!seen_.count(item.key())) errors_.push_back("unknown key '" + where_ + "." + item.key() + "'");
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!object_.is_object() || !object_.contains(key)) return nullptr;
    return &object_.at(key);
  }

  template <typename T>
  void read(const std::string& key, T& target, bool required = false) {
    const json* value = get(key);
    if (value == nullptr) {
      if (required) errors_.push_back("missing key '" + where_ + "." + key + "'");
      return;
    }
    bool ok = false;
    if constexpr (std::is_same_v<T, bool>) {
      ok = value->is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      ok = value->is_number_unsigned() || (value->is_number_integer() && value->get<long long>() >= 0);
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = value->is_number();
    } else {
      ok = value->is_string();
    }
    if (!ok) {
      errors_.push_back("key '" + where_ + "." + key + "' has the wrong type");
      return;
    }
    target = value->get<T>();
  }

 private:
  const json& object_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

[[noreturn]] void throw_config(const std::vector<std::string>& errors) {
  std::string message = "invalid experiment config:";
  for (const auto& e : errors) message += "\n  - " + e;
  throw ConfigError(message);
}

std::string join_indices(std::span<const std::size_t> indices) {
  std::string out;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k > 0) out += ';';
    out += std::to_string(indices[k]);
  }
  return out;
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  auto errors = environment.validate();
  if (seeds.empty()) errors.emplace_back("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    errors.emplace_back("seeds must be distinct");
  }
  if (output_dir.empty()) errors.emplace_back("output directory must not be empty");
  if (jobs == 0) errors.emplace_back("jobs must be at least 1");
  return errors;
}

ExperimentConfig parse_config(const json& document) {
  std::vector<std::string> errors;
  ExperimentConfig config;
  {
    ObjectReader root(document, "config", errors);
    int version = kConfigVersion;
    root.read("version", version, true);
    if (version != kConfigVersion) {
      errors.push_back("unsupported config version " + std::to_string(version));
    }

    if (const json* env = root.get("environment")) {
      ObjectReader r(*env, "environment", errors);
      std::string kind;
      r.read("kind", kind, true);
      if (!kind.empty()) {
        try {
          config.environment.kind = parse_kind(kind);
        } catch (const ConfigError& e) {
          errors.emplace_back(e.what());
        }
      }
      auto& spec = config.environment;
      r.read("n", spec.n, true);
      r.read("T", spec.T, true);
      r.read("seed", spec.seed);
      r.read("dimension", spec.dimension);
      r.read("r_max", spec.r_max);
      r.read("cost_min", spec.cost_min);
      r.read("cost_max", spec.cost_max);
      r.read("beta_max", spec.beta_max);
      r.read("value_max", spec.value_max);
      r.read("c_hat", spec.c_hat);
      r.read("shift_blocks", spec.shift_blocks);
    } else {
      errors.emplace_back("missing key 'config.environment'");
    }

    if (const json* alg = root.get("algorithm")) {
      ObjectReader r(*alg, "algorithm", errors);
      std::string mode = "auto";
      r.read("mode", mode);
      if (mode == "auto") {
        config.mode = AlgorithmMode::automatic;
      } else if (mode == "standard") {
        config.mode = AlgorithmMode::standard;
      } else {
        errors.push_back("algorithm.mode must be 'auto' or 'standard'");
      }
      std::string isa;
      r.read("kernels", isa);
      if (!isa.empty()) {
        try {
          config.kernels = kernels::parse_isa(isa);
        } catch (const Error& e) {
          errors.emplace_back(e.what());
        }
      }
    }

    if (const json* seeds = root.get("seeds")) {
      config.seeds.clear();
      if (!seeds->is_array()) {
        errors.emplace_back("seeds must be an array of non-negative integers");
      } else {
        for (const auto& s : *seeds) {
          if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)) {
            config.seeds.push_back(s.get<std::uint64_t>());
          } else {
            errors.emplace_back("seeds must be an array of non-negative integers");
            break;
          }
        }
      }
    }

    if (const json* out = root.get("output")) {
      ObjectReader r(*out, "output", errors);
      r.read("dir", config.output_dir);
      r.read("traces", config.write_traces);
      r.read("stream", config.write_stream);
    }
    root.read("bound_check", config.bound_check);
    root.read("history_cap", config.history_cap);
    root.read("jobs", config.jobs);
  }
  for (auto& e : config.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) throw_config(errors);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(document);
}

json config_to_json(const ExperimentConfig& config) {
  const auto& spec = config.environment;
  json algorithm = {{"mode", config.mode == AlgorithmMode::automatic ? "auto" : "standard"}};
  if (config.kernels) algorithm["kernels"] = std::string(kernels::isa_name(*config.kernels));
  return {
      {"version", kConfigVersion},
      {"environment",
       {{"kind", std::string(kind_name(spec.kind))},
        {"n", spec.n},
        {"T", spec.T},
        {"seed", spec.seed},
        {"dimension", spec.dimension},
        {"r_max", spec.r_max},
        {"cost_min", spec.cost_min},
        {"cost_max", spec.cost_max},
        {"beta_max", spec.beta_max},
        {"value_max", spec.value_max},
        {"c_hat", spec.c_hat},
        {"shift_blocks", spec.shift_blocks}}},
      {"algorithm", algorithm},
      {"seeds", config.seeds},
      {"output", {{"dir", config.output_dir}, {"traces", config.write_traces}, {"stream", config.write_stream}}},
      {"bound_check", config.bound_check},
      {"history_cap", config.history_cap},
      {"jobs", config.jobs},
  };
}

json RunReport::to_json() const {
  json j = {
      {"kind", kind},
      {"n", n},
      {"T", T},
      {"large_beta_mode", large_beta_mode},
      {"alpha", alpha},
      {"delta", delta},
      {"r_hat", r_hat},
      {"c_hat", c_hat},
      {"seeds", seeds},
      {"cumulative_profits", cumulative_profits},
      {"mean_profit", mean_profit},
      {"std_error", std_error},
      {"bound_checked", bound_checked},
  };
  if (large_beta_mode) j["experimental"] = true;
  if (bound_checked) {
    j["comparator_subset"] = comparator_subset;
    j["comparator_total"] = comparator_total;
    j["slack"] = slack;
    j["bound_satisfied"] = bound_satisfied;
  }
  return j;
}

TraceRow TraceRow::from_log(const TrialLog& log) {
  const auto actions = log.selection.actions();
  return {log.trial, {actions.begin(), actions.end()}, log.profit, log.cumulative_profit, log.grad_norm, log.eta};
}

std::string format_trace_row(const TraceRow& row) {
  std::string line = std::to_string(row.trial);
  line += ',';
  line += join_indices(row.selected);
  for (double v : {row.profit, row.cumulative_profit, row.grad_norm, row.eta}) {
    line += ',';
    line += format_double(v);
  }
  return line;
}

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot open trace file '" + path + "' for writing");
  out_ << kTraceHeader << '\n';
}

void TraceWriter::write(const TrialLog& log) {
  out_ << format_trace_row(TraceRow::from_log(log)) << '\n';
  if (!out_) throw IoError("failed writing trace file '" + path_ + "'");
}

void TraceWriter::close() {
  out_.close();
  if (!out_) throw IoError("failed closing trace file '" + path_ + "'");
}

void write_trace(std::span<const TrialLog> logs, const std::string& path) {
  TraceWriter writer(path);
  for (const auto& log : logs) writer.write(log);
  writer.close();
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string text;
  std::size_t line_no = 1;
  if (!std::getline(in, text) || text != kTraceHeader) throw ParseError("missing trace header", line_no);
  std::vector<TraceRow> rows;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    const auto fields = split(text, ',');
    if (fields.size() != 6) throw ParseError("expected 6 trace fields", line_no);
    TraceRow row;
    const auto trial = parse_unsigned(fields[0]);
    if (!trial) throw ParseError("bad trial index", line_no);
    row.trial = *trial;
    if (!fields[1].empty()) {
      for (auto part : split(fields[1], ';')) {
        const auto idx = parse_unsigned(part);
        if (!idx) throw ParseError("bad selected index '" + std::string(part) + "'", line_no);
        row.selected.push_back(*idx);
      }
    }
    double* targets[] = {&row.profit, &row.cumulative_profit, &row.grad_norm, &row.eta};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = parse_double(fields[2 + k]);
      if (!v) throw ParseError("bad number '" + std::string(fields[2 + k]) + "'", line_no);
      *targets[k] = *v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TraceRow> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

std::pair<double, double> stream_maxima(const TrialStream& stream) {
  double r_hat = 0.0;
  double c_hat = 0.0;
  for (const auto& trial : stream.trials) {
    for (double r : trial.rewards()) r_hat = std::max(r_hat, r);
    for (double c : trial.costs()) c_hat = std::max(c_hat, std::abs(c));
  }
  return {r_hat, c_hat};
}

std::string trace_path(const ExperimentConfig& config, std::uint64_t seed) {
  return (std::filesystem::path(config.output_dir) / ("trace_seed" + std::to_string(seed) + ".csv")).string();
}

namespace {

double run_seed(const ExperimentConfig& config, const TrialStream& stream, std::uint64_t seed) {
  std::optional<TraceWriter> writer;
  EngineOptions options;
  options.history_cap = config.history_cap;
  if (config.write_traces) {
    writer.emplace(trace_path(config, seed));
    options.sink = [&writer](const TrialLog& log) { writer->write(log); };
  }
  Engine engine(stream.action_set, seed, std::move(options));
  for (const auto& trial : stream.trials) {
    engine.select();
    engine.observe(trial);
  }
  if (writer) writer->close();
  return engine.cumulative_profit();
}

}  // namespace

RunReport run_on_stream(const ExperimentConfig& config, const TrialStream& stream) {
  auto errors = config.validate();
  if (!errors.empty()) throw_config(errors);
  if (stream.trials.empty()) throw ConfigError("stream contains no trials");
  if (const auto violation = check_pattern(stream, config.environment.kind); !violation.empty()) {
    throw ConfigError("stream violates the " + std::string(kind_name(config.environment.kind)) +
                      " pattern: " + violation);
  }
  const bool large_beta = !stream.action_set.standard_path();
  if (large_beta && config.mode == AlgorithmMode::standard) {
    throw ConfigError("algorithm.mode 'standard' cannot run an instance with an energy >= 1/2");
  }
  if (config.kernels) kernels::select(*config.kernels);
  if (config.write_traces) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir + "': " + ec.message());
  }

  RunReport report;
  report.kind = std::string(kind_name(config.environment.kind));
  report.n = stream.action_set.size();
  report.T = stream.trials.size();
  report.large_beta_mode = large_beta;
  {
    const Engine probe(stream.action_set, 0);
    report.alpha = probe.sampler_constants().alpha;
    report.delta = probe.sampler_constants().delta;
  }
  std::tie(report.r_hat, report.c_hat) = stream_maxima(stream);
  report.seeds = config.seeds;
  report.cumulative_profits.assign(config.seeds.size(), 0.0);

  // Seeds are independent; each worker owns its engine and trace file.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(config.seeds.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < config.seeds.size(); k = next++) {
      try {
        report.cumulative_profits[k] = run_seed(config, stream, config.seeds[k]);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.jobs, config.seeds.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  const double count = static_cast<double>(config.seeds.size());
  double sum = 0.0;
  for (double p : report.cumulative_profits) sum += p;
  report.mean_profit = sum / count;
  if (config.seeds.size() > 1) {
    double ss = 0.0;
    for (double p : report.cumulative_profits) ss += (p - report.mean_profit) * (p - report.mean_profit);
    report.std_error = std::sqrt(ss / (count - 1.0) / count);
  }

  report.bound_checked = config.bound_check && !large_beta && report.n <= kMaxComparatorActions;
  if (report.bound_checked) {
    const auto comparator = best_fixed_subset(stream.trials, stream.action_set, report.alpha, report.delta);
    report.comparator_subset = comparator.subset;
    report.comparator_total = comparator.discounted_total;
    report.slack = static_cast<double>(report.n) * std::sqrt(2.0 * static_cast<double>(report.T)) *
                   report.delta * (report.r_hat + report.c_hat);
    report.bound_satisfied =
        report.mean_profit >= report.comparator_total - report.slack - 3.0 * report.std_error;
  }
  return report;
}

namespace {

void write_report(const ExperimentConfig& config, const RunReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.output_dir + "': " + ec.message());
  const auto path = (std::filesystem::path(config.output_dir) / "report.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << report.to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  auto errors = config.validate();
  if (!errors.empty()) throw_config(errors);
  const TrialStream stream = generate(config.environment);
  if (config.write_stream) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir + "': " + ec.message());
    write_stream_file((std::filesystem::path(config.output_dir) / "stream.csv").string(), stream);
  }
  RunReport report = run_on_stream(config, stream);
  write_report(config, report);
  return report;
}

RunReport replay(const std::string& stream_path, const ExperimentConfig& config) {
  const TrialStream stream = read_stream_file(stream_path);
  RunReport report = run_on_stream(config, stream);
  write_report(config, report);
  return report;
}

}  // namespace maxhedge
