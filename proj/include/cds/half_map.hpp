#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cds/core.hpp"

namespace cds {

/// Shared record of which dimension range of each point lives at which
/// non-processing worker. Under the two-thirds scheme every point has exactly
/// two halves; after memory sharing a point carries one pair per split slice.
class HalfMap {
 public:
  struct Entry {
    WorkerId processor = 0;
    std::vector<Fragment> halves;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  HalfMap(std::size_t dim_bits, std::vector<Entry> entries)
      : dim_bits_(dim_bits), entries_(std::move(entries)) {}

  /// Initial layout for points processed according to `s0`: for a point
  /// processed by q, the lower-indexed non-processor gets [0, d/2) and the
  /// other gets [d/2, d).
  static HalfMap initial(const Shuffle& s0, std::size_t dim_bits);

  /// Rebuilds the map from each worker's reported halves.
  static HalfMap assemble(const Shuffle& s, std::size_t dim_bits,
                          std::span<const std::vector<Fragment>> contributions);

  std::size_t dim_bits() const noexcept { return dim_bits_; }
  std::size_t n_points() const noexcept { return entries_.size(); }
  const Entry& entry(PointId x) const { return entries_.at(x); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// The half of x held by worker w; throws ProtocolError if w does not hold
  /// exactly one.
  Fragment half_at(PointId x, WorkerId w) const;

  /// The half of x held by some non-processor other than `w`.
  Fragment half_not_at(PointId x, WorkerId w) const;

  /// Restriction to fragments inside [lo, hi), shifted down by lo.
  HalfMap slice(std::size_t lo, std::size_t hi) const;

  /// True when every entry's processor matches `s`.
  bool matches(const Shuffle& s) const;

  friend bool operator==(const HalfMap&, const HalfMap&) = default;

 private:
  std::size_t dim_bits_;
  std::vector<Entry> entries_;
};

/// Side-by-side combination: `high` is shifted up by `low_width`. Either side
/// may be absent.
std::optional<HalfMap> join_half_maps(const std::optional<HalfMap>& low, std::size_t low_width,
                                      const std::optional<HalfMap>& high,
                                      std::size_t high_width);

}  // namespace cds
