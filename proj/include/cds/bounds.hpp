#pragma once

#include <cstddef>

#include "cds/rational.hpp"

namespace cds {

struct TradeoffPoint {
  Rational storage_points;
  Rational rate_points;
};

/// Optimal worst-case rate for two workers, N/2 <= S <= N.
Rational opt_rate_k2(std::size_t n, const Rational& s);

/// Optimal worst-case rate for three workers, N/3 <= S <= N. Piecewise
/// linear with a breakpoint at S = 2N/3.
Rational opt_rate_k3(std::size_t n, const Rational& s);

/// Dispatches on k (2 or 3).
Rational opt_rate(std::size_t k, std::size_t n, const Rational& s);

/// Storage-plus-transmissions cut-set bound: N-S for K=2, (N-S)/2 for K=3.
/// May be evaluated anywhere; only K in {2, 3} is supported.
Rational lower_bound_cutset(std::size_t k, std::size_t n, const Rational& s);

/// Excess-storage bound for three workers: 7N/6 - 3S/2. Negative for large S.
Rational lower_bound_excess_k3(std::size_t n, const Rational& s);

/// Pointwise maximum of the applicable bounds, clamped at zero.
Rational combined_lower_bound(std::size_t k, std::size_t n, const Rational& s);

TradeoffPoint optimal_point(std::size_t k, std::size_t n, const Rational& s);

}  // namespace cds
