#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cds/core.hpp"
#include "cds/half_map.hpp"
#include "cds/schemes.hpp"

namespace cds {

/// One executing system: master, K workers, and the rate history.
///
/// Every step runs delivery, decodes at all workers against the master's
/// ground truth, applies the storage update, and re-checks the budget,
/// processing, overlap, and (two-thirds scheme) structural invariants.
/// A failed check throws InvariantViolation naming the constraint.
class SimulationRun {
 public:
  SimulationRun(Scheme scheme, Dataset data, Shuffle initial);

  RateRecord step(const Shuffle& next);

  const Scheme& scheme() const noexcept { return scheme_; }
  const Dataset& dataset() const noexcept { return data_; }
  const Shuffle& current() const noexcept { return current_; }
  const std::vector<WorkerState>& states() const noexcept { return placement_.states; }
  const std::optional<HalfMap>& half_map() const noexcept { return placement_.half_map; }
  const std::vector<RateRecord>& history() const noexcept { return history_; }

 private:
  void check_storage() const;

  Scheme scheme_;
  Dataset data_;
  Shuffle current_;
  Placement placement_;
  std::vector<RateRecord> history_;
};

/// `iterations` steps from a random initial shuffle; the dataset and every
/// shuffle come from `seed`.
std::vector<RateRecord> run_chain(const Scheme& scheme, std::size_t n, std::size_t d,
                                  std::uint64_t seed, std::size_t iterations);

/// Fresh placement at `from`, then one checked step to `to`.
RateRecord transition_rate(const Scheme& scheme, const Dataset& data, const Shuffle& from,
                           const Shuffle& to);

inline constexpr std::uint64_t kDefaultMaxPairs = 100000;

struct WorstCaseReport {
  Rational max_rate_points{0};
  std::optional<std::pair<Shuffle, Shuffle>> argmax_pair;
  std::uint64_t pairs_checked = 0;
  bool all_decoded = true;
  std::optional<std::pair<Shuffle, Shuffle>> failing_pair;
  std::string failure;
};

/// Visits every ordered pair of shuffles in lexicographic order with its
/// measured rate. Throws EnumerationCapExceeded beyond `max_pairs`.
void for_each_transition(const Scheme& scheme, const Dataset& data,
                         const std::function<void(const RateRecord&)>& visit,
                         std::uint64_t max_pairs = kDefaultMaxPairs);

/// Exhaustive maximum over all ordered shuffle pairs. Ties go to the
/// lexicographically smallest pair. A failed step stops the search and is
/// reported through all_decoded / failing_pair rather than thrown.
WorstCaseReport worst_case_search(const Scheme& scheme, std::size_t n, std::size_t d,
                                  std::uint64_t max_pairs = kDefaultMaxPairs,
                                  std::uint64_t seed = 0);

/// Each point is held in full by its processor, and each of the two
/// non-processors holds one of two disjoint d/2-bit halves that together
/// cover [0, d), with bits equal to the ground truth.
bool verify_structural_invariance(std::span<const WorkerState> states, const HalfMap& half_map,
                                  const Shuffle& shuffle, const Dataset& data);

}  // namespace cds
