#include "cds/schemes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "cds/errors.hpp"
#include "memory_share.hpp"

namespace cds {

// ---------------------------------------------------------------------------
// Scheme descriptors
// ---------------------------------------------------------------------------

namespace {

void require_divides(std::size_t k, std::size_t n) {
  if (k == 0 || n == 0 || n % k != 0) {
    throw std::invalid_argument("K=" + std::to_string(k) + " does not divide N=" +
                                std::to_string(n));
  }
}

Rational points(std::size_t n) { return Rational(static_cast<std::int64_t>(n)); }

}  // namespace

Scheme::Scheme(SchemeId id, std::size_t k, std::size_t n, Rational storage)
    : id_(id), k_(k), n_(n), storage_(storage) {}

Scheme Scheme::full_storage(std::size_t k, std::size_t n) {
  require_divides(k, n);
  return Scheme(SchemeId::FullStorage, k, n, points(n));
}

Scheme Scheme::k2_min(std::size_t n) {
  require_divides(2, n);
  return Scheme(SchemeId::K2Min, 2, n, points(n) / 2);
}

Scheme Scheme::k3_min(std::size_t n) {
  require_divides(3, n);
  return Scheme(SchemeId::K3Min, 3, n, points(n) / 3);
}

Scheme Scheme::k3_two_thirds(std::size_t n) {
  require_divides(3, n);
  return Scheme(SchemeId::K3TwoThirds, 3, n, points(2 * n) / 3);
}

Scheme Scheme::memory_share(Scheme low, Scheme high, Rational alpha) {
  if (low.k_ != high.k_ || low.n_ != high.n_) {
    throw std::invalid_argument("memory sharing needs schemes for the same K and N");
  }
  if (alpha < 0 || alpha > 1) {
    throw std::invalid_argument("memory sharing weight must lie in [0, 1], got " +
                                to_exact_string(alpha));
  }
  Scheme s(SchemeId::MemoryShare, low.k_, low.n_,
           alpha * low.storage_ + (1 - alpha) * high.storage_);
  s.alpha_ = alpha;
  s.low_ = std::make_shared<const Scheme>(std::move(low));
  s.high_ = std::make_shared<const Scheme>(std::move(high));
  return s;
}

const Scheme& Scheme::low() const {
  if (!low_) throw std::logic_error(name() + " has no inner schemes");
  return *low_;
}

const Scheme& Scheme::high() const {
  if (!high_) throw std::logic_error(name() + " has no inner schemes");
  return *high_;
}

std::size_t Scheme::low_width(std::size_t dim_bits) const {
  const Rational w = alpha_ * static_cast<std::int64_t>(dim_bits);
  if (w.denominator() != 1) {
    throw DivisibilityError("memory sharing weight " + to_exact_string(alpha_) +
                            " splits a " + std::to_string(dim_bits) +
                            "-bit point at a non-integral dimension " + to_exact_string(w));
  }
  return static_cast<std::size_t>(w.numerator());
}

std::size_t Scheme::budget_bits(std::size_t dim_bits) const {
  if (id_ == SchemeId::MemoryShare) {
    const auto wl = low_width(dim_bits);
    return low_->budget_bits(wl) + high_->budget_bits(dim_bits - wl);
  }
  return static_cast<std::size_t>(to_integer(storage_ * static_cast<std::int64_t>(dim_bits)));
}

std::string Scheme::name() const {
  switch (id_) {
    case SchemeId::FullStorage:
      return "FullStorage";
    case SchemeId::K2Min:
      return "K2Min";
    case SchemeId::K3Min:
      return "K3Min";
    case SchemeId::K3TwoThirds:
      return "K3TwoThirds";
    case SchemeId::MemoryShare:
      return "MemoryShare(" + low_->name() + ", " + high_->name() + ", " +
             to_exact_string(alpha_) + ")";
  }
  return "?";
}

void validate_dimensions(const Scheme& scheme, std::size_t dim_bits) {
  switch (scheme.id()) {
    case SchemeId::K3TwoThirds:
      if (dim_bits % 2 != 0) {
        throw DivisibilityError("K3TwoThirds needs an even slice width, got " +
                                std::to_string(dim_bits));
      }
      break;
    case SchemeId::MemoryShare: {
      const auto wl = scheme.low_width(dim_bits);
      if (wl > 0) validate_dimensions(scheme.low(), wl);
      if (dim_bits - wl > 0) validate_dimensions(scheme.high(), dim_bits - wl);
      break;
    }
    default:
      break;
  }
  (void)scheme.budget_bits(dim_bits);
}

std::vector<Rational> corner_storage(std::size_t k, std::size_t n) {
  require_divides(k, n);
  switch (k) {
    case 2:
      return {points(n) / 2, points(n)};
    case 3:
      return {points(n) / 3, points(2 * n) / 3, points(n)};
    default:
      throw std::invalid_argument("schemes exist only for K=2 and K=3, got K=" +
                                  std::to_string(k));
  }
}

namespace {

Scheme corner_scheme(std::size_t k, std::size_t n, const Rational& s) {
  if (s == points(n)) return Scheme::full_storage(k, n);
  if (k == 2) return Scheme::k2_min(n);
  return s == points(n) / 3 ? Scheme::k3_min(n) : Scheme::k3_two_thirds(n);
}

}  // namespace

Scheme select_scheme(std::size_t k, std::size_t n, const Rational& storage) {
  const auto corners = corner_storage(k, n);
  if (storage < corners.front() || storage > corners.back()) {
    throw std::invalid_argument("storage " + to_exact_string(storage) + " outside [" +
                                to_exact_string(corners.front()) + ", " +
                                to_exact_string(corners.back()) + "]");
  }
  for (std::size_t i = 0; i < corners.size(); ++i) {
    if (storage == corners[i]) return corner_scheme(k, n, storage);
    if (storage < corners[i]) {
      const auto& lo = corners[i - 1];
      const auto& hi = corners[i];
      return Scheme::memory_share(corner_scheme(k, n, lo), corner_scheme(k, n, hi),
                                  (hi - storage) / (hi - lo));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Corner schemes
// ---------------------------------------------------------------------------

namespace {

void check_shapes(const Scheme& scheme, const Shuffle& s) {
  if (s.k_workers() != scheme.k_workers() || s.n_points() != scheme.n_points()) {
    throw ProtocolError("shuffle for K=" + std::to_string(s.k_workers()) + ", N=" +
                        std::to_string(s.n_points()) + " used with " + scheme.name() +
                        " for K=" + std::to_string(scheme.k_workers()) + ", N=" +
                        std::to_string(scheme.n_points()));
  }
}

void check_processing(const WorkerState& state, const Shuffle& s_t) {
  const auto expected = s_t.batch(state.worker_id);
  if (state.processing.size() != expected.size() ||
      !std::all_of(expected.begin(), expected.end(),
                   [&](PointId x) { return state.processing.contains(x); })) {
    throw ProtocolError("worker " + std::to_string(state.worker_id) +
                        " is not processing its batch under shuffle " + s_t.to_string());
  }
}

const HalfMap& require_half_map(const std::optional<HalfMap>& half_map, const Shuffle& s_t) {
  if (!half_map) {
    throw ProtocolError("K3TwoThirds needs a half map");
  }
  if (!half_map->matches(s_t)) {
    throw ProtocolError("half map does not describe shuffle " + s_t.to_string());
  }
  return *half_map;
}

/// Points newly assigned to k: batch(s_t1, k) \ batch(s_t, k).
std::vector<PointId> arrivals(const Shuffle& s_t, const Shuffle& s_t1, WorkerId k) {
  std::vector<PointId> out;
  for (PointId x : s_t1.batch(k)) {
    if (s_t.worker_of(x) != k) out.push_back(x);
  }
  return out;
}

/// Points leaving k: batch(s_t, k) \ batch(s_t1, k).
std::vector<PointId> departures(const Shuffle& s_t, const Shuffle& s_t1, WorkerId k) {
  return arrivals(s_t1, s_t, k);
}

BitVec serialize(const std::vector<PointId>& ids, const std::vector<BitVec>& full) {
  BitVec out;
  for (PointId x : ids) out.append(full[x]);
  return out;
}

BitVec serialize_own(const std::vector<PointId>& ids, const WorkerState& state) {
  BitVec out;
  for (PointId x : ids) out.append(state.processing.at(x));
  return out;
}

/// The master's view of the dataset, collected from the processors.
std::vector<BitVec> collect_points(std::span<const WorkerState> states, const Shuffle& s_t) {
  std::vector<BitVec> full(s_t.n_points());
  for (PointId x = 0; x < s_t.n_points(); ++x) {
    full[x] = states[s_t.worker_of(x)].processing.at(x);
  }
  return full;
}

BitVec read_or_throw(const WorkerState& state, PointId x, std::size_t lo, std::size_t hi) {
  auto bits = state.read(x, lo, hi);
  if (!bits) {
    throw ProtocolError("worker " + std::to_string(state.worker_id) + " needs dims [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + ") of point " +
                        std::to_string(x) + " but does not store them");
  }
  return *std::move(bits);
}

/// Cuts `stream` into consecutive `width`-bit chunks, one per id.
void unpack(const BitVec& stream, const std::vector<PointId>& ids, std::size_t width,
            std::map<PointId, BitVec>& into) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    into[ids[i]] = stream.slice(i * width, (i + 1) * width);
  }
}

Placement leaf_init(const Scheme& scheme, const Dataset& data, const Shuffle& s0) {
  const std::size_t w = data.dim_bits();
  Placement out;
  if (scheme.id() == SchemeId::K3TwoThirds) {
    out.half_map = HalfMap::initial(s0, w);
  }
  for (WorkerId k = 0; k < scheme.k_workers(); ++k) {
    WorkerState st;
    st.worker_id = k;
    st.dim_bits = w;
    st.budget_bits = scheme.budget_bits(w);
    for (PointId x = 0; x < data.n_points(); ++x) {
      if (s0.worker_of(x) == k) {
        st.processing.emplace(x, data.point(x));
      } else if (scheme.id() == SchemeId::FullStorage) {
        st.excess.push_back({Fragment{x, 0, w, k}, data.point(x)});
      } else if (scheme.id() == SchemeId::K3TwoThirds) {
        const auto f = out.half_map->half_at(x, k);
        st.excess.push_back({f, data.point(x).slice(f.dim_lo, f.dim_hi)});
      }
    }
    out.states.push_back(std::move(st));
  }
  return out;
}

std::size_t leaf_message_bits(const Scheme& scheme, std::size_t w, const Shuffle& s_t,
                              const Shuffle& s_t1) {
  switch (scheme.id()) {
    case SchemeId::FullStorage:
      return 0;
    case SchemeId::K2Min:
      return departures(s_t, s_t1, 0).size() * w;
    case SchemeId::K3Min:
      return 2 * s_t.batch_size() * w;
    case SchemeId::K3TwoThirds: {
      std::size_t m = 0;
      for (WorkerId k = 0; k < 3; ++k) m = std::max(m, arrivals(s_t, s_t1, k).size());
      return m * (w / 2);
    }
    case SchemeId::MemoryShare:
      break;
  }
  throw std::logic_error("not a corner scheme");
}

Message leaf_deliver(const Scheme& scheme, std::span<const WorkerState> states,
                     const std::optional<HalfMap>& half_map, const Shuffle& s_t,
                     const Shuffle& s_t1) {
  const auto full = collect_points(states, s_t);
  BitVec payload;
  switch (scheme.id()) {
    case SchemeId::FullStorage:
      break;
    case SchemeId::K2Min: {
      // Old points each worker no longer needs, paired by ascending id.
      const std::array<BitVec, 2> ops{serialize(departures(s_t, s_t1, 0), full),
                                      serialize(departures(s_t, s_t1, 1), full)};
      payload = xor_fold(ops);
      break;
    }
    case SchemeId::K3Min: {
      const std::array<BitVec, 3> batches{serialize(s_t.batch(0), full),
                                          serialize(s_t.batch(1), full),
                                          serialize(s_t.batch(2), full)};
      payload = xor_fold(std::span(batches).first(2));
      payload.append(xor_fold(std::span(batches).subspan(1)));
      break;
    }
    case SchemeId::K3TwoThirds: {
      const auto& hm = require_half_map(half_map, s_t);
      std::array<BitVec, 3> ops;
      for (WorkerId k = 0; k < 3; ++k) {
        for (PointId x : arrivals(s_t, s_t1, k)) {
          const auto f = hm.half_not_at(x, k);
          ops[k].append(full[x].slice(f.dim_lo, f.dim_hi));
        }
      }
      payload = xor_fold(ops);
      break;
    }
    case SchemeId::MemoryShare:
      throw std::logic_error("not a corner scheme");
  }
  return Message(std::move(payload), s_t, s_t1);
}

BatchPayload leaf_decode(const Scheme& scheme, const WorkerState& state,
                         const std::optional<HalfMap>& half_map, const Message& msg,
                         const Shuffle& s_t, const Shuffle& s_t1) {
  const WorkerId k = state.worker_id;
  const std::size_t w = state.dim_bits;
  BatchPayload out;

  switch (scheme.id()) {
    case SchemeId::FullStorage:
      for (PointId x : s_t1.batch(k)) out[x] = read_or_throw(state, x, 0, w);
      return out;

    case SchemeId::K2Min: {
      const WorkerId other = 1 - k;
      BitVec theirs = msg.payload();
      theirs ^= serialize_own(departures(s_t, s_t1, k), state);
      unpack(theirs, departures(s_t, s_t1, other), w, out);
      for (PointId x : s_t1.batch(k)) {
        if (s_t.worker_of(x) == k) out[x] = state.processing.at(x);
      }
      return out;
    }

    case SchemeId::K3Min: {
      const std::size_t len = s_t.batch_size() * w;
      const BitVec x01 = msg.payload().slice(0, len);
      const BitVec x12 = msg.payload().slice(len, 2 * len);
      std::array<BitVec, 3> batches;
      batches[k] = serialize_own(s_t.batch(k), state);
      // Peel the chain A0^A1, A1^A2 outward from the batch we hold.
      if (k == 0) {
        batches[1] = x01;
        batches[1] ^= batches[0];
        batches[2] = x12;
        batches[2] ^= batches[1];
      } else if (k == 1) {
        batches[0] = x01;
        batches[0] ^= batches[1];
        batches[2] = x12;
        batches[2] ^= batches[1];
      } else {
        batches[1] = x12;
        batches[1] ^= batches[2];
        batches[0] = x01;
        batches[0] ^= batches[1];
      }
      BatchPayload all;
      for (WorkerId j = 0; j < 3; ++j) unpack(batches[j], s_t.batch(j), w, all);
      for (PointId x : s_t1.batch(k)) out[x] = all.at(x);
      return out;
    }

    case SchemeId::K3TwoThirds: {
      const auto& hm = require_half_map(half_map, s_t);
      const std::size_t h = w / 2;
      BitVec acc = msg.payload();
      for (WorkerId j = 0; j < 3; ++j) {
        if (j == k) continue;
        // Rebuild worker j's operand from our own storage.
        BitVec theirs;
        for (PointId x : arrivals(s_t, s_t1, j)) {
          const auto f = hm.half_not_at(x, j);
          theirs.append(read_or_throw(state, x, f.dim_lo, f.dim_hi));
        }
        acc ^= theirs;
      }
      const auto mine = arrivals(s_t, s_t1, k);
      if (acc.size() < mine.size() * h || !acc.slice(mine.size() * h, acc.size()).none()) {
        throw ProtocolError("residual after cancelling foreign operands is not ours");
      }
      for (std::size_t i = 0; i < mine.size(); ++i) {
        const PointId x = mine[i];
        const auto have = hm.half_at(x, k);
        const auto got = hm.half_not_at(x, k);
        BitVec point(w);
        const BitVec have_bits = read_or_throw(state, x, have.dim_lo, have.dim_hi);
        const BitVec got_bits = acc.slice(i * h, (i + 1) * h);
        for (std::size_t b = 0; b < h; ++b) {
          point.set(have.dim_lo + b, have_bits.test(b));
          point.set(got.dim_lo + b, got_bits.test(b));
        }
        out[x] = std::move(point);
      }
      for (PointId x : s_t1.batch(k)) {
        if (s_t.worker_of(x) == k) out[x] = state.processing.at(x);
      }
      return out;
    }

    case SchemeId::MemoryShare:
      break;
  }
  throw std::logic_error("not a corner scheme");
}

UpdateResult leaf_update(const Scheme& scheme, const WorkerState& state,
                         const std::optional<HalfMap>& half_map, const Message& msg,
                         const Shuffle& s_t, const Shuffle& s_t1) {
  const WorkerId k = state.worker_id;
  const std::size_t w = state.dim_bits;
  BatchPayload decoded = leaf_decode(scheme, state, half_map, msg, s_t, s_t1);

  UpdateResult out;
  out.state.worker_id = k;
  out.state.dim_bits = w;
  out.state.budget_bits = state.budget_bits;
  out.state.processing = std::move(decoded);

  switch (scheme.id()) {
    case SchemeId::FullStorage:
      // Same bits, relabelled between processing and excess.
      for (PointId x = 0; x < s_t1.n_points(); ++x) {
        if (s_t1.worker_of(x) != k) {
          out.state.excess.push_back({Fragment{x, 0, w, k}, read_or_throw(state, x, 0, w)});
        }
      }
      break;
    case SchemeId::K2Min:
    case SchemeId::K3Min:
      break;
    case SchemeId::K3TwoThirds: {
      const auto& hm = require_half_map(half_map, s_t);
      for (PointId x = 0; x < s_t1.n_points(); ++x) {
        const WorkerId q = s_t.worker_of(x);
        const WorkerId p = s_t1.worker_of(x);
        if (p == k) continue;  // processed here next round, already in `processing`
        Fragment keep;
        if (q == k) {
          // Former processor inherits the range the new processor used to hold.
          keep = hm.half_at(x, p);
          keep.holder = k;
        } else {
          // Unaffected non-processor, or no movement at all.
          keep = hm.half_at(x, k);
        }
        out.state.excess.push_back({keep, read_or_throw(state, x, keep.dim_lo, keep.dim_hi)});
        out.halves.push_back(keep);
      }
      break;
    }
    case SchemeId::MemoryShare:
      throw std::logic_error("not a corner scheme");
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

Placement init_placement(const Scheme& scheme, const Dataset& data, const Shuffle& s0) {
  check_shapes(scheme, s0);
  if (data.n_points() != scheme.n_points()) {
    throw std::invalid_argument("dataset has " + std::to_string(data.n_points()) +
                                " points, scheme expects " +
                                std::to_string(scheme.n_points()));
  }
  validate_dimensions(scheme, data.dim_bits());
  if (scheme.id() == SchemeId::MemoryShare) return detail::share_init(scheme, data, s0);
  return leaf_init(scheme, data, s0);
}

Message deliver(const Scheme& scheme, std::span<const WorkerState> states,
                const std::optional<HalfMap>& half_map, const Shuffle& s_t,
                const Shuffle& s_t1) {
  check_shapes(scheme, s_t);
  check_shapes(scheme, s_t1);
  if (states.size() != scheme.k_workers()) {
    throw ProtocolError("expected " + std::to_string(scheme.k_workers()) +
                        " worker states, got " + std::to_string(states.size()));
  }
  for (WorkerId k = 0; k < states.size(); ++k) {
    if (states[k].worker_id != k) {
      throw ProtocolError("worker states out of order");
    }
    check_processing(states[k], s_t);
  }
  if (scheme.id() == SchemeId::MemoryShare) {
    return detail::share_deliver(scheme, states, half_map, s_t, s_t1);
  }
  return leaf_deliver(scheme, states, half_map, s_t, s_t1);
}

namespace {

void check_worker_inputs(const Scheme& scheme, const WorkerState& state, const Message& msg,
                         const Shuffle& s_t, const Shuffle& s_t1) {
  check_shapes(scheme, s_t);
  check_shapes(scheme, s_t1);
  if (msg.from() != s_t || msg.to() != s_t1) {
    throw ProtocolError("message was encoded for a different transition");
  }
  if (state.worker_id >= scheme.k_workers()) {
    throw ProtocolError("worker index " + std::to_string(state.worker_id) + " out of range");
  }
  check_processing(state, s_t);
  const auto expected = message_bits(scheme, state.dim_bits, s_t, s_t1);
  if (msg.length_bits() != expected) {
    throw ProtocolError("message has " + std::to_string(msg.length_bits()) +
                        " bits, transition implies " + std::to_string(expected));
  }
}

}  // namespace

BatchPayload decode(const Scheme& scheme, const WorkerState& state,
                    const std::optional<HalfMap>& half_map, const Message& msg,
                    const Shuffle& s_t, const Shuffle& s_t1) {
  check_worker_inputs(scheme, state, msg, s_t, s_t1);
  if (scheme.id() == SchemeId::MemoryShare) {
    return detail::share_decode(scheme, state, half_map, msg, s_t, s_t1);
  }
  return leaf_decode(scheme, state, half_map, msg, s_t, s_t1);
}

UpdateResult update(const Scheme& scheme, const WorkerState& state,
                    const std::optional<HalfMap>& half_map, const Message& msg,
                    const Shuffle& s_t, const Shuffle& s_t1) {
  check_worker_inputs(scheme, state, msg, s_t, s_t1);
  if (scheme.id() == SchemeId::MemoryShare) {
    return detail::share_update(scheme, state, half_map, msg, s_t, s_t1);
  }
  return leaf_update(scheme, state, half_map, msg, s_t, s_t1);
}

std::size_t message_bits(const Scheme& scheme, std::size_t dim_bits, const Shuffle& s_t,
                         const Shuffle& s_t1) {
  if (scheme.id() == SchemeId::MemoryShare) {
    const auto wl = scheme.low_width(dim_bits);
    const auto wh = dim_bits - wl;
    return (wl ? message_bits(scheme.low(), wl, s_t, s_t1) : 0) +
           (wh ? message_bits(scheme.high(), wh, s_t, s_t1) : 0);
  }
  return leaf_message_bits(scheme, dim_bits, s_t, s_t1);
}

}  // namespace cds
