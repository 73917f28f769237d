#pragma once

namespace bellgames {

/// Binary entropy in bits, with 0 log 0 = 0. Throws DomainError outside [0, 1].
double binary_entropy(double p);

struct EntropyGap {
  double lhs = 0.0;  ///< 1 - H(p)
  double rhs = 0.0;  ///< (2 / ln 2) (p - 1/2)^2
  bool holds = false;
};

/// Evaluates both sides of 1 - H(p) >= (2 / ln 2)(p - 1/2)^2; holds uses a 1e-12 slack.
EntropyGap entropy_gap_check(double p);

}  // namespace bellgames
