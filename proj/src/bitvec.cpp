#include "cds/bitvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace cds {

BitVec BitVec::from_string(std::string_view text) {
  BitVec out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
    out.bits_[i] = text[i] == '1';
  }
  return out;
}

BitVec BitVec::slice(std::size_t lo, std::size_t hi) const {
  if (lo > hi || hi > size()) {
    throw std::out_of_range("bit slice [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            ") outside length " + std::to_string(size()));
  }
  BitVec out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(lo),
                   bits_.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

void BitVec::append(const BitVec& tail) {
  bits_.insert(bits_.end(), tail.bits_.begin(), tail.bits_.end());
}

BitVec& BitVec::operator^=(const BitVec& other) {
  if (other.size() > size()) {
    bits_.resize(other.size(), false);
  }
  for (std::size_t i = 0; i < other.size(); ++i) {
    bits_[i] = bits_[i] != other.bits_[i];
  }
  return *this;
}

bool BitVec::none() const noexcept {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

std::string BitVec::to_string() const {
  std::string out(size(), '0');
  for (std::size_t i = 0; i < size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

BitVec xor_fold(std::span<const BitVec> operands) {
  if (operands.empty()) {
    throw std::invalid_argument("xor_fold needs at least one operand");
  }
  BitVec acc;
  for (const auto& op : operands) {
    acc ^= op;
  }
  return acc;
}

BitVec concat(std::span<const BitVec> parts) {
  BitVec out;
  for (const auto& p : parts) {
    out.append(p);
  }
  return out;
}

}  // namespace cds
