#include "bellgames/numerics/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bellgames/errors.hpp"

namespace bellgames {

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p must lie in [0, 1], got " + std::to_string(p));
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(p) + term(1.0 - p);
}

EntropyGap entropy_gap_check(double p) {
  EntropyGap gap;
  gap.lhs = 1.0 - binary_entropy(p);
  gap.rhs = 2.0 / std::numbers::ln2 * (p - 0.5) * (p - 0.5);
  gap.holds = gap.lhs >= gap.rhs - 1e-12;
  return gap;
}

}  // namespace bellgames
