#include "cds/core.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cds/errors.hpp"

namespace cds {

Dataset::Dataset(std::size_t dim_bits, std::vector<BitVec> payload)
    : dim_bits_(dim_bits), payload_(std::move(payload)) {
  for (std::size_t x = 0; x < payload_.size(); ++x) {
    if (payload_[x].size() != dim_bits_) {
      throw std::invalid_argument("point " + std::to_string(x) + " has " +
                                  std::to_string(payload_[x].size()) + " bits, expected " +
                                  std::to_string(dim_bits_));
    }
  }
}

Dataset Dataset::slice(std::size_t lo, std::size_t hi) const {
  std::vector<BitVec> out;
  out.reserve(payload_.size());
  for (const auto& p : payload_) {
    out.push_back(p.slice(lo, hi));
  }
  return Dataset(hi - lo, std::move(out));
}

Dataset make_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("dataset needs at least one point");
  }
  if (d < 2 || d % 2 != 0) {
    throw std::invalid_argument("point width d must be even and at least 2, got " +
                                std::to_string(d));
  }
  std::mt19937_64 rng(seed);
  std::vector<BitVec> payload;
  payload.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    BitVec v(d);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i % 64 == 0) word = rng();
      v.set(i, (word >> (i % 64)) & 1U);
    }
    payload.push_back(std::move(v));
  }
  return Dataset(d, std::move(payload));
}

Shuffle::Shuffle(std::vector<WorkerId> assignment, std::size_t k_workers)
    : assignment_(std::move(assignment)), k_workers_(k_workers) {
  if (k_workers_ == 0) {
    throw std::invalid_argument("a shuffle needs at least one worker");
  }
  if (assignment_.empty() || assignment_.size() % k_workers_ != 0) {
    throw std::invalid_argument("K=" + std::to_string(k_workers_) + " does not divide N=" +
                                std::to_string(assignment_.size()));
  }
  std::vector<std::size_t> counts(k_workers_, 0);
  for (auto w : assignment_) {
    if (w >= k_workers_) {
      throw std::invalid_argument("worker index " + std::to_string(w) + " out of range");
    }
    ++counts[w];
  }
  const auto per = assignment_.size() / k_workers_;
  for (std::size_t k = 0; k < k_workers_; ++k) {
    if (counts[k] != per) {
      throw std::invalid_argument("worker " + std::to_string(k) + " has " +
                                  std::to_string(counts[k]) + " points, expected " +
                                  std::to_string(per));
    }
  }
}

std::vector<PointId> Shuffle::batch(WorkerId k) const {
  if (k >= k_workers_) {
    throw std::out_of_range("worker index " + std::to_string(k) + " out of range");
  }
  std::vector<PointId> ids;
  ids.reserve(batch_size());
  for (PointId x = 0; x < assignment_.size(); ++x) {
    if (assignment_[x] == k) ids.push_back(x);
  }
  return ids;
}

std::string Shuffle::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(assignment_[i]);
  }
  return out;
}

Shuffle Shuffle::parse(std::string_view text, std::size_t k_workers) {
  std::vector<WorkerId> assignment;
  while (true) {
    auto comma = text.find(',');
    auto field = text.substr(0, comma);
    WorkerId w = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), w);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw std::invalid_argument("bad shuffle field '" + std::string(field) + "'");
    }
    assignment.push_back(w);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return Shuffle(std::move(assignment), k_workers);
}

std::vector<PointId> batch(const Shuffle& s, WorkerId k) { return s.batch(k); }

Shuffle random_shuffle(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  if (k == 0 || n % k != 0) {
    throw std::invalid_argument("K=" + std::to_string(k) + " does not divide N=" +
                                std::to_string(n));
  }
  // A uniform permutation of the label multiset is uniform over labeled
  // equal partitions: each partition has the same number of preimages.
  std::vector<WorkerId> labels;
  labels.reserve(n);
  for (std::size_t w = 0; w < k; ++w) {
    labels.insert(labels.end(), n / k, w);
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  return Shuffle(std::move(labels), k);
}

std::optional<std::uint64_t> count_shuffles(std::size_t n, std::size_t k) {
  if (k == 0 || n % k != 0) return std::nullopt;
  // Product of binomials C(n - j*b, b); each is exact at every step.
  const std::size_t b = n / k;
  std::uint64_t total = 1;
  std::size_t remaining = n;
  for (std::size_t j = 0; j < k; ++j) {
    std::uint64_t binom = 1;
    for (std::uint64_t i = 1; i <= b; ++i) {
      // binom * m / i is integral; cancel i first to keep the product small.
      std::uint64_t m = remaining - b + i;
      const std::uint64_t g = std::gcd(binom, i);
      binom /= g;
      m /= i / g;
      if (binom > std::numeric_limits<std::uint64_t>::max() / m) return std::nullopt;
      binom *= m;
    }
    if (total > std::numeric_limits<std::uint64_t>::max() / binom) return std::nullopt;
    total *= binom;
    remaining -= b;
  }
  return total;
}

std::vector<Shuffle> enumerate_shuffles(std::size_t n, std::size_t k, std::uint64_t cap) {
  const auto count = count_shuffles(n, k);
  if (k == 0 || n % k != 0) {
    throw std::invalid_argument("K=" + std::to_string(k) + " does not divide N=" +
                                std::to_string(n));
  }
  if (!count || *count > cap) {
    throw EnumerationCapExceeded("shuffles", count.value_or(UINT64_MAX), cap);
  }
  std::vector<WorkerId> labels;
  for (std::size_t w = 0; w < k; ++w) {
    labels.insert(labels.end(), n / k, w);
  }
  std::vector<Shuffle> out;
  out.reserve(*count);
  do {
    out.emplace_back(labels, k);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return out;
}

std::size_t WorkerState::stored_bits() const {
  std::size_t bits = 0;
  for (const auto& [x, payload] : processing) bits += payload.size();
  for (const auto& f : excess) bits += f.bits.size();
  return bits;
}

std::optional<BitVec> WorkerState::read(PointId x, std::size_t lo, std::size_t hi) const {
  if (auto it = processing.find(x); it != processing.end()) {
    return it->second.slice(lo, hi);
  }
  for (const auto& f : excess) {
    if (f.fragment.point_id == x && f.fragment.dim_lo <= lo && hi <= f.fragment.dim_hi) {
      return f.bits.slice(lo - f.fragment.dim_lo, hi - f.fragment.dim_lo);
    }
  }
  return std::nullopt;
}

bool WorkerState::has_overlap() const {
  for (std::size_t i = 0; i < excess.size(); ++i) {
    const auto& a = excess[i].fragment;
    if (processing.contains(a.point_id)) return true;
    for (std::size_t j = i + 1; j < excess.size(); ++j) {
      if (a.overlaps(excess[j].fragment)) return true;
    }
  }
  return false;
}

Rational Message::rate_points(std::size_t dim_bits) const {
  return Rational(static_cast<std::int64_t>(length_bits()),
                  static_cast<std::int64_t>(dim_bits));
}

}  // namespace cds
