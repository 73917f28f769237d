#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bellgames::harness {

enum class Tier { smoke, full };

std::string to_string(Tier tier);
Tier tier_from_string(const std::string& name);

inline constexpr int kCriterionCount = 13;
inline constexpr std::uint64_t kAcceptanceSeed = 20240601;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
  /// Numeric outputs only; compared bitwise by the determinism criterion.
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
};

std::string criterion_name(int id);
std::vector<int> tier_criteria(Tier tier);

/// Runs a single numeric criterion (1-12) from the given root seed.
CriterionResult run_criterion(int id, std::uint64_t seed);

/// Reruns `ids` with a different worker count and compares their metrics
/// against `reference` exactly.
CriterionResult determinism_criterion(const std::vector<CriterionResult>& reference, std::uint64_t seed);

struct AcceptanceSummary {
  Tier tier = Tier::smoke;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;
  double seconds = 0.0;

  int passed() const;
  int failed() const;
};

using CriterionCallback = std::function<void(const CriterionResult&)>;

AcceptanceSummary run_acceptance(Tier tier, std::uint64_t seed, const CriterionCallback& on_result = {});

/// "[PASS] 01 chsh-golden (0.01 s) detail" style line.
std::string format_result_line(const CriterionResult& result);

nlohmann::ordered_json to_json(const AcceptanceSummary& summary);

}  // namespace bellgames::harness
