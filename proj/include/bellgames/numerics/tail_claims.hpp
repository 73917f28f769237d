#pragma once

#include <cstddef>

#include "bellgames/numerics/rng.hpp"

namespace bellgames {

/// Empirical frequency of a Gaussian tail event next to its claimed bound.
struct TailProbeResult {
  int k = 0;
  /// R for the norm probe, eps for the inner-product probe.
  double parameter = 0.0;
  double threshold = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
  double hit_frequency = 0.0;
  double bound = 0.0;
};

/// Threshold sqrt(8 k ln R) for the norm of a k-dimensional standard Gaussian.
double norm_tail_threshold(int k, double R);
/// Threshold sqrt(16 ln(4/eps) max(k, ln(2/eps))) for |<X, Y>|.
double inner_tail_threshold(int k, double eps);

/// Fraction of standard Gaussians in R^k whose norm exceeds norm_tail_threshold;
/// bound = R^-k. Requires k >= 1, R >= 2, samples >= 1.
TailProbeResult norm_tail_probe(int k, double R, std::size_t samples, const RngStream& stream);

/// Fraction of independent Gaussian pairs in R^k with |<X, Y>| above
/// inner_tail_threshold; bound = eps. Requires k >= 1 and 0 < eps < 1.
TailProbeResult inner_tail_probe(int k, double eps, std::size_t samples, const RngStream& stream);

}  // namespace bellgames
