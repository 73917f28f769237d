#include "bellgames/harness/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bellgames/errors.hpp"

namespace bellgames::harness {
namespace {

template <class T>
void put(nlohmann::ordered_json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <class T>
void get(const nlohmann::json& j, const char* key, std::optional<T>& value) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    value = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

template <class T>
void take(std::optional<T>& into, const std::optional<T>& flag) {
  if (flag) into = flag;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string scalar_csv(const nlohmann::ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format12(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return quoted + "\"";
  }
  return v.dump();
}

/// Applies 12-digit rounding to every float in a JSON tree.
void round_tree(nlohmann::ordered_json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_tree(child);
  }
}

}  // namespace

std::string to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw ValidationError("unknown output format '" + name + "' (expected csv or json)");
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["command"] = config.command;
  j["subcommand"] = config.subcommand;
  put(j, "n", config.n);
  put(j, "k", config.k);
  put(j, "c", config.c);
  put(j, "policy", config.policy);
  put(j, "samples", config.samples);
  put(j, "restarts", config.restarts);
  put(j, "method", config.method);
  put(j, "mode", config.mode);
  put(j, "m", config.m);
  put(j, "seeds", config.seeds);
  put(j, "R", config.R);
  put(j, "eps", config.eps);
  put(j, "step", config.step);
  put(j, "beta", config.beta);
  put(j, "gamma_sq", config.gamma_sq);
  if (!config.grid_betas.empty()) j["grid_betas"] = config.grid_betas;
  if (!config.grid_gamma_sqs.empty()) j["grid_gamma_sqs"] = config.grid_gamma_sqs;
  put(j, "seed", config.seed);
  put(j, "workers", config.workers);
  put(j, "out", config.out);
  j["format"] = to_string(config.format);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  static const std::set<std::string> known = {
      "command", "subcommand", "n",    "k",    "c",          "policy",         "samples", "restarts",
      "method",  "mode",       "m",    "seeds", "R",         "eps",            "step",    "beta",
      "gamma_sq", "grid_betas", "grid_gamma_sqs", "seed", "workers", "out", "format"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ValidationError("unknown config field '" + key + "'");
  RunConfig c;
  std::optional<std::string> text;
  get(j, "command", text);
  if (text) c.command = *text;
  text.reset();
  get(j, "subcommand", text);
  if (text) c.subcommand = *text;
  get(j, "n", c.n);
  get(j, "k", c.k);
  get(j, "c", c.c);
  get(j, "policy", c.policy);
  get(j, "samples", c.samples);
  get(j, "restarts", c.restarts);
  get(j, "method", c.method);
  get(j, "mode", c.mode);
  get(j, "m", c.m);
  get(j, "seeds", c.seeds);
  get(j, "R", c.R);
  get(j, "eps", c.eps);
  get(j, "step", c.step);
  get(j, "beta", c.beta);
  get(j, "gamma_sq", c.gamma_sq);
  std::optional<std::vector<double>> grid;
  get(j, "grid_betas", grid);
  if (grid) c.grid_betas = *grid;
  grid.reset();
  get(j, "grid_gamma_sqs", grid);
  if (grid) c.grid_gamma_sqs = *grid;
  get(j, "seed", c.seed);
  get(j, "workers", c.workers);
  get(j, "out", c.out);
  text.reset();
  get(j, "format", text);
  if (text) c.format = output_format_from_string(*text);
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

RunConfig merge_configs(const RunConfig& file, const RunConfig& flags) {
  RunConfig c = file;
  if (!flags.command.empty()) c.command = flags.command;
  if (!flags.subcommand.empty()) c.subcommand = flags.subcommand;
  take(c.n, flags.n);
  take(c.k, flags.k);
  take(c.c, flags.c);
  take(c.policy, flags.policy);
  take(c.samples, flags.samples);
  take(c.restarts, flags.restarts);
  take(c.method, flags.method);
  take(c.mode, flags.mode);
  take(c.m, flags.m);
  take(c.seeds, flags.seeds);
  take(c.R, flags.R);
  take(c.eps, flags.eps);
  take(c.step, flags.step);
  take(c.beta, flags.beta);
  take(c.gamma_sq, flags.gamma_sq);
  if (!flags.grid_betas.empty()) c.grid_betas = flags.grid_betas;
  if (!flags.grid_gamma_sqs.empty()) c.grid_gamma_sqs = flags.grid_gamma_sqs;
  take(c.seed, flags.seed);
  take(c.workers, flags.workers);
  take(c.out, flags.out);
  c.format = flags.format;
  return c;
}

bool is_stochastic(const RunConfig& config) {
  const std::string& cmd = config.command;
  const std::string& sub = config.subcommand;
  if (cmd == "jp") {
    if (sub == "value") return config.method.value_or("exact") == "alternating";
    return true;  // every other jp operation samples an instance or a probe
  }
  if (cmd == "coset") {
    if (sub == "value") {
      const std::string method = config.method.value_or("quantum");
      if (method == "weight-heuristic") return config.n.value_or(0) > 16;
      return config.mode.value_or("reduced") == "mc";
    }
    return false;
  }
  if (cmd == "maxent" || cmd == "claims") return sub != "entropy-gap";
  return false;
}

void validate(const RunConfig& config) {
  static const std::set<std::pair<std::string, std::string>> routes = {
      {"jp", "build"},          {"jp", "value"},        {"jp", "probe-expectation"}, {"jp", "violation"},
      {"coset", "build"},       {"coset", "value"},     {"coset", "optimize"},       {"maxent", "audit"},
      {"claims", "norm-tail"},  {"claims", "inner-tail"}, {"claims", "entropy-gap"}, {"accept", "smoke"},
      {"accept", "full"}};
  require(routes.contains({config.command, config.subcommand}),
          "unknown subcommand '" + config.command + " " + config.subcommand + "'");
  require(!is_stochastic(config) || config.seed.has_value(),
          "--seed is required for '" + config.command + " " + config.subcommand + "'");
  if (config.workers) require(*config.workers >= 1, "--workers must be >= 1");
  if (config.n) require(*config.n >= 1, "--n must be >= 1");
  if (config.k) require(*config.k >= 1, "--k must be >= 1");
  if (config.c) require(*config.c > 0.0 && std::isfinite(*config.c), "--c must be positive and finite");
  if (config.samples) require(*config.samples >= 1, "--samples must be >= 1");
  if (config.restarts) require(*config.restarts >= 1, "--restarts must be >= 1");
  if (config.m) require(*config.m >= 1, "--m must be >= 1");
  if (config.seeds) require(*config.seeds >= 1, "--seeds must be >= 1");
  if (config.R) require(*config.R >= 2.0, "--R must be >= 2");
  if (config.eps) require(*config.eps > 0.0 && *config.eps < 1.0, "--eps must lie in (0, 1)");
  if (config.step) require(*config.step > 0.0 && *config.step <= 0.5, "--step must lie in (0, 0.5]");
  if (config.beta) require(*config.beta > 0.0, "--beta must be positive");
  if (config.gamma_sq) require(*config.gamma_sq > 0.0 && *config.gamma_sq < 1.0, "--gamma-sq must lie in (0, 1)");
  for (double b : config.grid_betas) require(b > 0.0, "grid betas must be positive");
  for (double g : config.grid_gamma_sqs) require(g > 0.0 && g < 1.0, "grid gamma^2 values must lie in (0, 1)");
  if (config.command == "coset" || config.command == "maxent") {
    const int n = config.n.value_or(0);
    require(n >= 2 && (n & (n - 1)) == 0, "--n must be a power of two >= 2 for the coset game");
  }
  if (config.command == "jp" && config.subcommand != "probe-expectation") {
    require(config.n.has_value() && config.k.has_value(), "jp needs --n and --k");
  }
  if (config.subcommand == "probe-expectation") require(config.k.has_value(), "probe-expectation needs --k");
  if (config.subcommand == "norm-tail") require(config.k && config.R, "norm-tail needs --k and --R");
  if (config.subcommand == "inner-tail") require(config.k && config.eps, "inner-tail needs --k and --eps");
}

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

bool RunRecord::all_checks_pass() const {
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

nlohmann::ordered_json to_json(const RunRecord& record) {
  nlohmann::ordered_json j;
  j["schema"] = kRunRecordSchema;
  j["version"] = record.version;
  j["config"] = to_json(record.config);
  j["wall_seconds"] = record.wall_seconds;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& row : record.rows) j["results"].push_back(row);
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (const auto& [name, ok] : record.checks) checks[name] = ok;
  j["checks"] = checks;
  j["all_checks_pass"] = record.all_checks_pass();
  round_tree(j);
  return j;
}

std::string to_csv(const RunRecord& record) {
  std::vector<std::string> columns;
  std::set<std::string> seen;
  for (const auto& row : record.rows)
    for (const auto& [key, value] : row.items())
      if (seen.insert(key).second) columns.push_back(key);

  std::ostringstream out;
  bool first = true;
  for (const auto& col : columns) {
    out << (first ? "" : ",") << col;
    first = false;
  }
  for (const auto& [name, ok] : record.checks) {
    out << (first ? "" : ",") << "check_" << name;
    first = false;
  }
  out << '\n';
  for (const auto& row : record.rows) {
    first = true;
    for (const auto& col : columns) {
      out << (first ? "" : ",") << (row.contains(col) ? scalar_csv(row.at(col)) : "");
      first = false;
    }
    for (const auto& [name, ok] : record.checks) {
      out << (first ? "" : ",") << (ok ? "true" : "false");
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace bellgames::harness
