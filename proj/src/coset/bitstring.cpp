#include "bellgames/coset/bitstring.hpp"

#include <bit>
#include <cstdio>

#include "bellgames/errors.hpp"

namespace bellgames::coset {
namespace {

std::uint64_t length_mask(int length) {
  return length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
}

}  // namespace

BitString::BitString(std::uint64_t bits, int length) : bits_(bits), length_(length) {
  if (length < 1 || length > 64) throw DomainError("bit string length must be in 1..64");
  if ((bits & ~length_mask(length)) != 0) throw DomainError("bit string has bits beyond its length");
}

BitString BitString::from_binary(std::string_view text) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      bits |= std::uint64_t{1} << i;
    else if (text[i] != '0')
      throw DomainError("binary string may contain only 0 and 1");
  }
  return BitString(bits, static_cast<int>(text.size()));
}

BitString BitString::from_hex(std::string_view text, int length) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty() || text.size() > 16) throw DomainError("hex bit string must have 1..16 digits");
  std::uint64_t bits = 0;
  for (char ch : text) {
    int digit;
    if (ch >= '0' && ch <= '9')
      digit = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      digit = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      digit = ch - 'A' + 10;
    else
      throw DomainError("invalid hex digit in bit string");
    bits = (bits << 4) | static_cast<std::uint64_t>(digit);
  }
  return BitString(bits, length);
}

int BitString::weight() const { return std::popcount(bits_); }

std::string BitString::to_binary() const {
  std::string out(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i)
    if (bit(i)) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

std::string BitString::to_hex() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(bits_));
  return buf;
}

BitString BitString::operator^(const BitString& other) const {
  if (length_ != other.length_) throw DimensionError("xor of bit strings with different lengths");
  return BitString(bits_ ^ other.bits_, length_);
}

bool BitString::lex_less(const BitString& other) const {
  const std::uint64_t diff = bits_ ^ other.bits_;
  if (diff == 0) return length_ < other.length_;
  // the first differing position decides; a 0 there sorts first
  return !bit(std::countr_zero(diff));
}

int hamming_distance(const BitString& a, const BitString& b) {
  if (a.length() != b.length()) throw DimensionError("Hamming distance of strings with different lengths");
  return std::popcount(a.bits() ^ b.bits());
}

}  // namespace bellgames::coset
