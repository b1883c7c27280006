#pragma once

#include <stdexcept>
#include <string>

namespace cds {

/// Raised when worker storage, the half map, or a message does not match the
/// shuffle it is supposed to describe, or when a decoder needs a fragment it
/// does not hold.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named system-model constraint (budget, processing, decodability, ...)
/// failed during a protocol step.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// Slice widths or storage values that a scheme cannot realise exactly.
class DivisibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration refused because it would exceed the configured cap.
class EnumerationCapExceeded : public std::runtime_error {
 public:
  EnumerationCapExceeded(const std::string& what_is_counted, unsigned long long count,
                         unsigned long long cap)
      : std::runtime_error("refusing to enumerate " + std::to_string(count) + " " +
                           what_is_counted + " (cap " + std::to_string(cap) + ")"),
        count_(count) {}

  unsigned long long count() const noexcept { return count_; }

 private:
  unsigned long long count_;
};

}  // namespace cds
