#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cds/core.hpp"
#include "cds/half_map.hpp"
#include "cds/rational.hpp"

namespace cds {

enum class SchemeId { FullStorage, K2Min, K3Min, K3TwoThirds, MemoryShare };

/// A placement/delivery/update strategy for a fixed (K, N) and storage S
/// (in points). MemoryShare nests two schemes on complementary dimension slices.
class Scheme {
 public:
  /// S = N: every worker keeps the whole dataset.
  static Scheme full_storage(std::size_t k, std::size_t n);
  /// K = 2, S = N/2.
  static Scheme k2_min(std::size_t n);
  /// K = 3, S = N/3.
  static Scheme k3_min(std::size_t n);
  /// K = 3, S = 2N/3, structurally invariant half placement.
  static Scheme k3_two_thirds(std::size_t n);
  /// The low alpha*d dimensions run `low`, the rest run `high`.
  /// S = alpha*S_low + (1-alpha)*S_high.
  static Scheme memory_share(Scheme low, Scheme high, Rational alpha);

  SchemeId id() const noexcept { return id_; }
  std::size_t k_workers() const noexcept { return k_; }
  std::size_t n_points() const noexcept { return n_; }
  Rational storage_points() const noexcept { return storage_; }

  Rational alpha() const noexcept { return alpha_; }
  const Scheme& low() const;
  const Scheme& high() const;

  /// Width of the low slice for a d-bit point; DivisibilityError if alpha*d
  /// is not an integer.
  std::size_t low_width(std::size_t dim_bits) const;

  /// Storage budget in bits for points of width `dim_bits`.
  std::size_t budget_bits(std::size_t dim_bits) const;

  std::string name() const;

 private:
  Scheme(SchemeId id, std::size_t k, std::size_t n, Rational storage);

  SchemeId id_;
  std::size_t k_;
  std::size_t n_;
  Rational storage_;
  Rational alpha_{1};
  std::shared_ptr<const Scheme> low_;
  std::shared_ptr<const Scheme> high_;
};

/// Throws DivisibilityError unless every slice of `scheme` gets an integral
/// width and the two-thirds scheme always sees an even width.
void validate_dimensions(const Scheme& scheme, std::size_t dim_bits);

/// Dedicated scheme at a corner storage value, otherwise memory sharing
/// between the two nearest corners. K must be 2 or 3 and N/K <= S <= N.
Scheme select_scheme(std::size_t k, std::size_t n, const Rational& storage);

/// Corner storage values available for K workers, ascending.
std::vector<Rational> corner_storage(std::size_t k, std::size_t n);

struct Placement {
  std::vector<WorkerState> states;
  std::optional<HalfMap> half_map;
};

using BatchPayload = std::map<PointId, BitVec>;

struct UpdateResult {
  WorkerState state;
  /// Halves this worker now holds in excess storage.
  std::vector<Fragment> halves;
};

Placement init_placement(const Scheme& scheme, const Dataset& data, const Shuffle& s0);

/// Master-side encoder.
Message deliver(const Scheme& scheme, std::span<const WorkerState> states,
                const std::optional<HalfMap>& half_map, const Shuffle& s_t,
                const Shuffle& s_t1);

/// Worker-side decoder: the full payloads of batch(s_t1, k), built only from
/// `state` (worker k's storage), the message, and the shared layout.
BatchPayload decode(const Scheme& scheme, const WorkerState& state,
                    const std::optional<HalfMap>& half_map, const Message& msg,
                    const Shuffle& s_t, const Shuffle& s_t1);

/// Worker-side storage update. Receives nothing beyond the worker's own
/// storage, the broadcast, and the shared descriptors.
UpdateResult update(const Scheme& scheme, const WorkerState& state,
                    const std::optional<HalfMap>& half_map, const Message& msg,
                    const Shuffle& s_t, const Shuffle& s_t1);

/// Length of deliver()'s output, computable from the shuffles alone.
std::size_t message_bits(const Scheme& scheme, std::size_t dim_bits, const Shuffle& s_t,
                         const Shuffle& s_t1);

}  // namespace cds
