#include "cds/bounds.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cds {

namespace {

Rational as_points(std::size_t n) { return Rational(static_cast<std::int64_t>(n)); }

void require_storage_range(std::size_t k, std::size_t n, const Rational& s) {
  const auto lo = as_points(n) / static_cast<std::int64_t>(k);
  if (s < lo || s > as_points(n)) {
    throw std::out_of_range("storage " + to_exact_string(s) + " outside [" +
                            to_exact_string(lo) + ", " + std::to_string(n) + "] for K=" +
                            std::to_string(k));
  }
}

void require_supported(std::size_t k) {
  if (k != 2 && k != 3) {
    throw std::invalid_argument("bounds are available only for K=2 and K=3, got K=" +
                                std::to_string(k));
  }
}

}  // namespace

Rational opt_rate_k2(std::size_t n, const Rational& s) {
  require_storage_range(2, n, s);
  return as_points(n) - s;
}

Rational opt_rate_k3(std::size_t n, const Rational& s) {
  require_storage_range(3, n, s);
  const auto N = as_points(n);
  if (s <= 2 * N / 3) {
    return 7 * N / 6 - 3 * s / 2;
  }
  return N / 2 - s / 2;
}

Rational opt_rate(std::size_t k, std::size_t n, const Rational& s) {
  require_supported(k);
  return k == 2 ? opt_rate_k2(n, s) : opt_rate_k3(n, s);
}

Rational lower_bound_cutset(std::size_t k, std::size_t n, const Rational& s) {
  require_supported(k);
  const auto gap = as_points(n) - s;
  return k == 2 ? gap : gap / 2;
}

Rational lower_bound_excess_k3(std::size_t n, const Rational& s) {
  require_storage_range(3, n, s);
  return 7 * as_points(n) / 6 - 3 * s / 2;
}

Rational combined_lower_bound(std::size_t k, std::size_t n, const Rational& s) {
  require_supported(k);
  require_storage_range(k, n, s);
  Rational bound = lower_bound_cutset(k, n, s);
  if (k == 3) bound = std::max(bound, lower_bound_excess_k3(n, s));
  return std::max(bound, Rational(0));
}

TradeoffPoint optimal_point(std::size_t k, std::size_t n, const Rational& s) {
  return {s, opt_rate(k, n, s)};
}

}  // namespace cds
