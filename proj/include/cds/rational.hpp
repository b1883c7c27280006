#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace cds {

/// Exact rate and storage quantities. Every rate in the library is kept as
/// a ratio of integers; nothing in the accounting path touches floating point.
using Rational = boost::rational<std::int64_t>;

/// "p/q", or "p" when the denominator is 1.
std::string to_exact_string(const Rational& value);

/// Fixed-point rendering with at least `digits` fractional digits.
///
/// Terminating values are printed exactly (more than `digits` digits if they
/// need them); non-terminating values are rounded half away from zero at
/// `digits` places. Computed with integer arithmetic only.
std::string to_decimal_string(const Rational& value, int digits = 6);

/// Accepts "p/q", "p", or a plain decimal such as "2.5" or "-0.125".
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// The integer value of `value`; throws DivisibilityError if it is not integral.
std::int64_t to_integer(const Rational& value);

}  // namespace cds
