#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace bellgames {

/// Labels used as path components when splitting streams.
enum class StreamTag : std::uint64_t {
  alice = 1,
  bob = 2,
  samples = 3,
  restarts = 4,
  instance = 5,
  probe = 6,
  shared = 7,
};

/// Counter-based random stream (Philox4x32-10) keyed by a root seed and a
/// structured path.
///
/// Two streams with the same (root_seed, path) produce identical sequences.
/// Child streams are derived by hashing the path, so any substream can be
/// regenerated without replaying its siblings.
class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed);

  RngStream child(std::uint64_t label) const;
  RngStream child(StreamTag tag) const { return child(static_cast<std::uint64_t>(tag)); }

  std::uint64_t root_seed() const { return root_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double gaussian();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  RngStream(std::uint64_t root_seed, std::vector<std::uint64_t> path);
  void refill();

  std::uint64_t root_seed_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  std::optional<double> spare_gaussian_;
};

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

}  // namespace bellgames
