#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cds/bitvec.hpp"
#include "cds/rational.hpp"

namespace cds {

using PointId = std::size_t;
using WorkerId = std::size_t;

/// The master's ground-truth data: N points of d bits each.
class Dataset {
 public:
  /// Every payload must have exactly `dim_bits` bits.
  Dataset(std::size_t dim_bits, std::vector<BitVec> payload);

  std::size_t n_points() const noexcept { return payload_.size(); }
  std::size_t dim_bits() const noexcept { return dim_bits_; }
  std::size_t total_bits() const noexcept { return n_points() * dim_bits_; }

  const BitVec& point(PointId id) const { return payload_.at(id); }
  const std::vector<BitVec>& payload() const noexcept { return payload_; }

  /// The dataset restricted to dimensions [lo, hi) of every point.
  Dataset slice(std::size_t lo, std::size_t hi) const;

 private:
  std::size_t dim_bits_;
  std::vector<BitVec> payload_;
};

/// N points of d pseudorandom bits, reproducible from `seed`.
/// Requires n >= 1 and an even d >= 2.
Dataset make_dataset(std::size_t n, std::size_t d, std::uint64_t seed);

/// A labeled partition of point ids into K equal batches.
class Shuffle {
 public:
  /// `assignment[x]` is the worker that processes point x. Throws
  /// std::invalid_argument unless every worker gets exactly N/K points.
  Shuffle(std::vector<WorkerId> assignment, std::size_t k_workers);

  std::size_t n_points() const noexcept { return assignment_.size(); }
  std::size_t k_workers() const noexcept { return k_workers_; }
  std::size_t batch_size() const noexcept { return n_points() / k_workers_; }

  WorkerId worker_of(PointId x) const { return assignment_.at(x); }
  const std::vector<WorkerId>& assignment() const noexcept { return assignment_; }

  /// Ascending ids of the points assigned to worker `k`.
  std::vector<PointId> batch(WorkerId k) const;

  /// "0,1,2" form used on the command line.
  std::string to_string() const;
  static Shuffle parse(std::string_view text, std::size_t k_workers);

  friend bool operator==(const Shuffle&, const Shuffle&) = default;
  friend auto operator<=>(const Shuffle& a, const Shuffle& b) {
    return a.assignment_ <=> b.assignment_;
  }

 private:
  std::vector<WorkerId> assignment_;
  std::size_t k_workers_;
};

/// Ascending ids assigned to worker k under `s`.
std::vector<PointId> batch(const Shuffle& s, WorkerId k);

/// Uniform over all labeled equal partitions of n ids into k batches.
Shuffle random_shuffle(std::size_t n, std::size_t k, std::mt19937_64& rng);

/// n! / ((n/k)!^k), or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> count_shuffles(std::size_t n, std::size_t k);

inline constexpr std::uint64_t kDefaultShuffleCap = 100000;

/// Every labeled equal partition exactly once, in lexicographic order of the
/// assignment vector. Throws EnumerationCapExceeded if there are more than `cap`.
std::vector<Shuffle> enumerate_shuffles(std::size_t n, std::size_t k,
                                        std::uint64_t cap = kDefaultShuffleCap);

/// A dimension range [dim_lo, dim_hi) of one point, held by `holder`.
struct Fragment {
  PointId point_id = 0;
  std::size_t dim_lo = 0;
  std::size_t dim_hi = 0;
  WorkerId holder = 0;

  std::size_t length() const noexcept { return dim_hi - dim_lo; }
  bool overlaps(const Fragment& other) const noexcept {
    return point_id == other.point_id && dim_lo < other.dim_hi && other.dim_lo < dim_hi;
  }

  friend bool operator==(const Fragment&, const Fragment&) = default;
  friend auto operator<=>(const Fragment&, const Fragment&) = default;
};

struct StoredFragment {
  Fragment fragment;
  BitVec bits;

  friend bool operator==(const StoredFragment&, const StoredFragment&) = default;
};

/// One worker's storage: the batch it is processing (full points) plus
/// uncoded fragments of other points in its excess storage.
struct WorkerState {
  WorkerId worker_id = 0;
  std::size_t dim_bits = 0;
  std::size_t budget_bits = 0;
  std::map<PointId, BitVec> processing;
  std::vector<StoredFragment> excess;

  std::size_t stored_bits() const;

  /// Bits [lo, hi) of point x if some single stored item covers the range.
  std::optional<BitVec> read(PointId x, std::size_t lo, std::size_t hi) const;

  /// True if two stored items overlap in some point's dimension range.
  bool has_overlap() const;

  friend bool operator==(const WorkerState&, const WorkerState&) = default;
};

/// The broadcast for one shuffle transition. The shuffle descriptors ride
/// along as ambient side information and are not counted in the rate.
class Message {
 public:
  Message(BitVec payload, Shuffle from, Shuffle to)
      : payload_(std::move(payload)), from_(std::move(from)), to_(std::move(to)) {}

  const BitVec& payload() const noexcept { return payload_; }
  std::size_t length_bits() const noexcept { return payload_.size(); }
  const Shuffle& from() const noexcept { return from_; }
  const Shuffle& to() const noexcept { return to_; }

  /// Rate in points: length_bits / d.
  Rational rate_points(std::size_t dim_bits) const;

 private:
  BitVec payload_;
  Shuffle from_;
  Shuffle to_;
};

struct RateRecord {
  std::size_t iteration = 0;
  std::int64_t rate_bits = 0;
  Rational rate_points;
  Shuffle from;
  Shuffle to;
};

}  // namespace cds
