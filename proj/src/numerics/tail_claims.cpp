#include "bellgames/numerics/tail_claims.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bellgames/errors.hpp"
#include "bellgames/numerics/parallel.hpp"

namespace bellgames {
namespace {

constexpr std::size_t kProbeBlock = 4096;

template <class Hit>
std::size_t count_hits(std::size_t samples, const RngStream& stream, Hit&& hit) {
  const RngStream base = stream.child(StreamTag::samples);
  return deterministic_reduce<std::size_t>(
      samples, kProbeBlock,
      [&](std::size_t begin, std::size_t end) {
        RngStream local = base.child(begin / kProbeBlock);
        std::size_t hits = 0;
        for (std::size_t i = begin; i < end; ++i)
          if (hit(local)) ++hits;
        return hits;
      },
      [](std::size_t a, std::size_t b) { return a + b; }, std::size_t{0});
}

void require_probe_shape(int k, std::size_t samples) {
  if (k < 1) throw DomainError("tail probe: k must be >= 1, got " + std::to_string(k));
  if (samples < 1) throw DomainError("tail probe: samples must be >= 1");
}

}  // namespace

double norm_tail_threshold(int k, double R) {
  if (k < 1) throw DomainError("norm tail: k must be >= 1");
  if (!(R >= 2.0)) throw DomainError("norm tail: R must be >= 2, got " + std::to_string(R));
  return std::sqrt(8.0 * k * std::log(R));
}

double inner_tail_threshold(int k, double eps) {
  if (k < 1) throw DomainError("inner tail: k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("inner tail: eps must lie in (0, 1), got " + std::to_string(eps));
  return std::sqrt(16.0 * std::log(4.0 / eps) * std::max<double>(k, std::log(2.0 / eps)));
}

TailProbeResult norm_tail_probe(int k, double R, std::size_t samples, const RngStream& stream) {
  require_probe_shape(k, samples);
  const double threshold = norm_tail_threshold(k, R);
  const double threshold_sq = threshold * threshold;
  const std::size_t hits = count_hits(samples, stream, [&](RngStream& rng) {
    double sq = 0.0;
    for (int i = 0; i < k; ++i) {
      const double g = rng.gaussian();
      sq += g * g;
    }
    return sq > threshold_sq;
  });
  TailProbeResult out;
  out.k = k;
  out.parameter = R;
  out.threshold = threshold;
  out.samples = samples;
  out.hits = hits;
  out.hit_frequency = static_cast<double>(hits) / static_cast<double>(samples);
  out.bound = std::pow(R, -static_cast<double>(k));
  return out;
}

TailProbeResult inner_tail_probe(int k, double eps, std::size_t samples, const RngStream& stream) {
  require_probe_shape(k, samples);
  const double threshold = inner_tail_threshold(k, eps);
  const std::size_t hits = count_hits(samples, stream, [&, k](RngStream& rng) {
    // coordinates of X and Y are drawn interleaved; all 2k draws are independent
    double dot = 0.0;
    for (int i = 0; i < k; ++i) {
      const double xi = rng.gaussian();
      dot += xi * rng.gaussian();
    }
    return std::abs(dot) > threshold;
  });
  TailProbeResult out;
  out.k = k;
  out.parameter = eps;
  out.threshold = threshold;
  out.samples = samples;
  out.hits = hits;
  out.hit_frequency = static_cast<double>(hits) / static_cast<double>(samples);
  out.bound = eps;
  return out;
}

}  // namespace bellgames
