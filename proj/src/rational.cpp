#include "cds/rational.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

#include "cds/errors.hpp"

namespace cds {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

bool terminates(std::int64_t den) {
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

}  // namespace

std::string to_exact_string(const Rational& value) {
  if (value.denominator() == 1) {
    return std::to_string(value.numerator());
  }
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

std::string to_decimal_string(const Rational& value, int digits) {
  const bool negative = value.numerator() < 0;
  // Work on |value| in unsigned arithmetic; boost keeps the denominator positive.
  const auto num = static_cast<unsigned long long>(negative ? -value.numerator()
                                                            : value.numerator());
  const auto den = static_cast<unsigned long long>(value.denominator());

  unsigned long long whole = num / den;
  unsigned long long rem = num % den;

  std::string frac;
  const bool exact = terminates(value.denominator());
  for (int i = 0; i < digits || (exact && rem != 0); ++i) {
    rem *= 10;
    frac.push_back(static_cast<char>('0' + rem / den));
    rem %= den;
  }

  if (!exact && 2 * rem >= den) {
    // Round half away from zero with carry propagation.
    int i = static_cast<int>(frac.size()) - 1;
    for (; i >= 0; --i) {
      if (frac[static_cast<std::size_t>(i)] == '9') {
        frac[static_cast<std::size_t>(i)] = '0';
      } else {
        ++frac[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) ++whole;
  }

  std::string out = negative ? "-" : "";
  out += std::to_string(whole);
  if (!frac.empty()) {
    out += "." + frac;
  }
  return out;
}

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(text.substr(0, slash), text);
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (negative) int_part.remove_prefix(1);
    if ((int_part.empty() && frac_part.empty()) || frac_part.size() > 15) {
      throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    }
    for (char c : frac_part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
      }
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
    const std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
    Rational r(whole * scale + frac, scale);
    return negative ? -r : r;
  }
  return Rational(parse_int(text, text));
}

std::int64_t to_integer(const Rational& value) {
  if (value.denominator() != 1) {
    throw DivisibilityError(to_exact_string(value) + " is not an integer");
  }
  return value.numerator();
}

}  // namespace cds
