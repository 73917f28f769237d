#include "bellgames/numerics/rng.hpp"

#include <cmath>
#include <numbers>

namespace bellgames {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> derive_key(std::uint64_t root, const std::vector<std::uint64_t>& path) {
  std::uint64_t h = splitmix64(root ^ 0x243F6A8885A308D3ull);
  std::uint64_t depth = 0;
  for (auto label : path) {
    ++depth;
    h = splitmix64(h ^ splitmix64(label + 0x13198A2E03707344ull * depth));
  }
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t root_seed) : RngStream(root_seed, {}) {}

RngStream::RngStream(std::uint64_t root_seed, std::vector<std::uint64_t> path)
    : root_seed_(root_seed), path_(std::move(path)), key_(derive_key(root_seed_, path_)) {}

RngStream RngStream::child(std::uint64_t label) const {
  auto path = path_;
  path.push_back(label);
  return RngStream(root_seed_, std::move(path));
}

void RngStream::refill() {
  buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), 0u, 0u},
                          key_);
  ++block_;
  buffer_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buffer_pos_ > 2) refill();
  const std::uint64_t lo = buffer_[buffer_pos_];
  const std::uint64_t hi = buffer_[buffer_pos_ + 1];
  buffer_pos_ += 2;
  return lo | (hi << 32);
}

double RngStream::uniform() {
  // (m + 0.5) / 2^53 never hits 0 or 1
  const std::uint64_t m = next_u64() >> 11;
  return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (spare_gaussian_) {
    const double g = *spare_gaussian_;
    spare_gaussian_.reset();
    return g;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_gaussian_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // rejection sampling keeps the draw exactly uniform
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

}  // namespace bellgames
