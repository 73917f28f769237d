// Acceptance driver: one PASS/FAIL line per criterion, exit 2 on any failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include "bellgames/errors.hpp"
#include "bellgames/harness/acceptance.hpp"

namespace bh = bellgames::harness;

int main(int argc, char** argv) {
  const std::string tier_name = argc > 1 ? argv[1] : "smoke";
  std::uint64_t seed = bh::kAcceptanceSeed;
  if (argc > 2) seed = std::strtoull(argv[2], nullptr, 10);
  bh::Tier tier;
  try {
    tier = bh::tier_from_string(tier_name);
  } catch (const bellgames::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  std::cout << "acceptance tier=" << tier_name << " seed=" << seed << std::endl;
  const auto summary =
      bh::run_acceptance(tier, seed, [](const bh::CriterionResult& r) { std::cout << bh::format_result_line(r) << std::endl; });
  std::cout << summary.passed() << " passed, " << summary.failed() << " failed, " << summary.seconds << " s" << std::endl;
  return summary.failed() == 0 ? 0 : 2;
}
