#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bellgames::harness {

inline constexpr const char* kRunRecordSchema = "bellgames.run_record/1";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class OutputFormat { json, csv };

/// Everything needed to regenerate one experiment. Unset optionals fall back
/// to per-operation defaults during dispatch.
struct RunConfig {
  std::string command;     ///< jp | coset | maxent | claims | accept
  std::string subcommand;  ///< e.g. build, value, audit, norm-tail, smoke

  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> c;
  std::optional<std::string> policy;  ///< fixed-c | adaptive
  std::optional<std::size_t> samples;
  std::optional<int> restarts;
  std::optional<std::string> method;
  std::optional<std::string> mode;  ///< exact | reduced | mc
  std::optional<int> m;
  std::optional<int> seeds;
  std::optional<double> R;
  std::optional<double> eps;
  std::optional<double> step;
  std::optional<double> beta;
  std::optional<double> gamma_sq;
  std::vector<double> grid_betas;
  std::vector<double> grid_gamma_sqs;

  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::json;
};

std::string to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& name);

nlohmann::ordered_json to_json(const RunConfig& config);
/// Reads the structured config file (JSON object with the same keys as to_json).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);
/// Fields set in `flags` win over those in `file`.
RunConfig merge_configs(const RunConfig& file, const RunConfig& flags);

/// True when the subcommand draws random numbers and so needs a root seed.
bool is_stochastic(const RunConfig& config);
/// Throws ValidationError naming the first offending field.
void validate(const RunConfig& config);

/// Rounds to 12 significant digits, the precision of every emitted float.
double round12(double x);
std::string format12(double x);

/// One row of output: ordered (column, value) pairs.
using MetricRow = nlohmann::ordered_json;

struct RunRecord {
  RunConfig config;
  std::string version = kArtifactVersion;
  double wall_seconds = 0.0;
  std::vector<MetricRow> rows;
  /// Invariant flags asserted by the operation, in insertion order.
  std::vector<std::pair<std::string, bool>> checks;

  bool all_checks_pass() const;
};

nlohmann::ordered_json to_json(const RunRecord& record);
/// Header line plus one line per row. Columns: the union of row keys in first
/// appearance order, then one column per check.
std::string to_csv(const RunRecord& record);

}  // namespace bellgames::harness
