#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bellgames::coset {

/// Packed bit string of length 1..64. Position i is bit i of the word; the
/// binary text form lists position 0 first ("0101" has positions 1 and 3 set).
class BitString {
 public:
  BitString() = default;
  BitString(std::uint64_t bits, int length);

  static BitString from_binary(std::string_view text);
  /// Accepts an optional "0x" prefix; the hex value is the packed word.
  static BitString from_hex(std::string_view text, int length);

  std::uint64_t bits() const { return bits_; }
  int length() const { return length_; }
  bool bit(int i) const { return ((bits_ >> i) & 1u) != 0; }
  int weight() const;

  std::string to_binary() const;
  std::string to_hex() const;

  BitString operator^(const BitString& other) const;
  bool operator==(const BitString&) const = default;

  /// Lexicographic order of the binary text forms.
  bool lex_less(const BitString& other) const;

 private:
  std::uint64_t bits_ = 0;
  int length_ = 0;
};

int hamming_distance(const BitString& a, const BitString& b);

}  // namespace bellgames::coset
