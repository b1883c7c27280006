#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cds {

/// A fixed-length string of bits. Bit 0 is the leftmost bit of
/// `to_string()`; slicing, appending, and XOR all use that orientation.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n_bits) : bits_(n_bits, false) {}

  /// Parses a string of '0'/'1' characters.
  static BitVec from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool test(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool value) { bits_.at(i) = value; }

  /// Bits [lo, hi).
  BitVec slice(std::size_t lo, std::size_t hi) const;
  void append(const BitVec& tail);

  /// XOR with `other`, zero-extending whichever operand is shorter at the tail.
  BitVec& operator^=(const BitVec& other);

  bool none() const noexcept;
  std::string to_string() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  std::vector<bool> bits_;
};

/// XOR of every operand after zero-padding each to the longest length.
/// The result has the maximum operand length. Throws std::invalid_argument
/// when `operands` is empty.
BitVec xor_fold(std::span<const BitVec> operands);

/// Concatenation in the given order.
BitVec concat(std::span<const BitVec> parts);

}  // namespace cds
