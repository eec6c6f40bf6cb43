#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "maxhedge/engine.hpp"
#include "maxhedge/environments.hpp"
#include "maxhedge/kernels.hpp"

namespace maxhedge {

inline constexpr int kConfigVersion = 1;

enum class AlgorithmMode {
  automatic,  // large-energy wrapper when some z_i >= 1/2
  standard,   // reject instances that would need the wrapper
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  AlgorithmMode mode = AlgorithmMode::automatic;
  std::optional<kernels::Isa> kernels;  // unset: keep the process-wide choice
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "maxhedge_out";
  bool write_traces = true;
  bool write_stream = true;
  bool bound_check = true;
  std::size_t history_cap = 1024;
  std::size_t jobs = 1;

  std::vector<std::string> validate() const;
};

// Parses the JSON config. Unknown keys, wrong types and every constraint violation are collected
// and reported together in one ConfigError.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct RunReport {
  std::string kind;
  std::size_t n = 0;
  std::size_t T = 0;
  bool large_beta_mode = false;
  double alpha = 0.0;
  double delta = 0.0;
  double r_hat = 0.0;
  double c_hat = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> cumulative_profits;
  double mean_profit = 0.0;
  double std_error = 0.0;
  bool bound_checked = false;
  std::vector<std::size_t> comparator_subset;
  double comparator_total = 0.0;
  // n sqrt(2T) delta (r_hat + c_hat)
  double slack = 0.0;
  // mean >= comparator - slack - 3 SE; meaningful only when bound_checked.
  bool bound_satisfied = false;

  nlohmann::json to_json() const;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// One CSV row of a trace.
struct TraceRow {
  std::size_t trial = 0;
  std::vector<std::size_t> selected;
  double profit = 0.0;
  double cumulative_profit = 0.0;
  double grad_norm = 0.0;
  double eta = 0.0;

  static TraceRow from_log(const TrialLog& log);
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

inline constexpr const char* kTraceHeader = "trial,selected,profit,cum_profit,grad_norm,eta";

// Streams TrialLogs to CSV as they are produced.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const TrialLog& log);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

std::string format_trace_row(const TraceRow& row);
void write_trace(std::span<const TrialLog> logs, const std::string& path);
std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace_file(const std::string& path);

// r-hat = max_{t,i} r, c-hat = max_{t,i} |c|.
std::pair<double, double> stream_maxima(const TrialStream& stream);

// Runs every seed of the config over a given stream and aggregates the report. Writes the per-seed
// traces when config.write_traces is set.
RunReport run_on_stream(const ExperimentConfig& config, const TrialStream& stream);

// Generates the environment stream (saved as <out>/stream.csv when write_stream is set), runs it
// and writes <out>/report.json.
RunReport run_experiment(const ExperimentConfig& config);

// Runs the config's seeds over a previously saved stream file.
RunReport replay(const std::string& stream_path, const ExperimentConfig& config);

std::string trace_path(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace maxhedge
