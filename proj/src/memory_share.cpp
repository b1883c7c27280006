#include "memory_share.hpp"

#include "cds/errors.hpp"

namespace cds::detail {

namespace {

struct Split {
  std::size_t low_width;
  std::size_t high_width;
};

Split split_of(const Scheme& scheme, std::size_t dim_bits) {
  const auto wl = scheme.low_width(dim_bits);
  return {wl, dim_bits - wl};
}

/// Worker storage restricted to dims [lo, hi), shifted down by lo.
WorkerState slice_state(const WorkerState& state, std::size_t lo, std::size_t hi,
                        std::size_t budget) {
  WorkerState out;
  out.worker_id = state.worker_id;
  out.dim_bits = hi - lo;
  out.budget_bits = budget;
  for (const auto& [x, bits] : state.processing) {
    out.processing.emplace(x, bits.slice(lo, hi));
  }
  for (const auto& f : state.excess) {
    const auto& fr = f.fragment;
    if (fr.dim_lo >= lo && fr.dim_hi <= hi) {
      out.excess.push_back({Fragment{fr.point_id, fr.dim_lo - lo, fr.dim_hi - lo, fr.holder},
                            f.bits});
    } else if (fr.dim_lo < hi && lo < fr.dim_hi) {
      throw ProtocolError("fragment of point " + std::to_string(fr.point_id) +
                          " straddles a memory-sharing slice boundary");
    }
  }
  return out;
}

WorkerState join_states(const WorkerState& low, const WorkerState& high) {
  if (low.processing.size() != high.processing.size()) {
    throw ProtocolError("memory-sharing slices disagree on the processing batch");
  }
  WorkerState out;
  out.worker_id = low.worker_id;
  out.dim_bits = low.dim_bits + high.dim_bits;
  out.budget_bits = low.budget_bits + high.budget_bits;
  for (const auto& [x, bits] : low.processing) {
    auto it = high.processing.find(x);
    if (it == high.processing.end()) {
      throw ProtocolError("memory-sharing slices disagree on the processing batch");
    }
    BitVec joined = bits;
    joined.append(it->second);
    out.processing.emplace(x, std::move(joined));
  }
  out.excess = low.excess;
  for (const auto& f : high.excess) {
    const auto& fr = f.fragment;
    out.excess.push_back({Fragment{fr.point_id, fr.dim_lo + low.dim_bits,
                                   fr.dim_hi + low.dim_bits, fr.holder},
                          f.bits});
  }
  return out;
}

std::optional<HalfMap> slice_map(const std::optional<HalfMap>& hm, std::size_t lo,
                                 std::size_t hi) {
  if (!hm) return std::nullopt;
  return hm->slice(lo, hi);
}

Message slice_message(const Message& msg, std::size_t lo, std::size_t hi) {
  return Message(msg.payload().slice(lo, hi), msg.from(), msg.to());
}

}  // namespace

// A zero-width slice carries no data, so the scheme on the other slice runs
// on the whole point.

Placement share_init(const Scheme& scheme, const Dataset& data, const Shuffle& s0) {
  const auto [wl, wh] = split_of(scheme, data.dim_bits());
  if (wh == 0) return init_placement(scheme.low(), data, s0);
  if (wl == 0) return init_placement(scheme.high(), data, s0);

  auto low = init_placement(scheme.low(), data.slice(0, wl), s0);
  auto high = init_placement(scheme.high(), data.slice(wl, wl + wh), s0);
  Placement out;
  for (std::size_t k = 0; k < low.states.size(); ++k) {
    out.states.push_back(join_states(low.states[k], high.states[k]));
  }
  out.half_map = join_half_maps(low.half_map, wl, high.half_map, wh);
  return out;
}

Message share_deliver(const Scheme& scheme, std::span<const WorkerState> states,
                      const std::optional<HalfMap>& half_map, const Shuffle& s_t,
                      const Shuffle& s_t1) {
  const std::size_t d = states.front().dim_bits;
  const auto [wl, wh] = split_of(scheme, d);
  if (wh == 0) return deliver(scheme.low(), states, half_map, s_t, s_t1);
  if (wl == 0) return deliver(scheme.high(), states, half_map, s_t, s_t1);

  std::vector<WorkerState> low_states;
  std::vector<WorkerState> high_states;
  for (const auto& st : states) {
    low_states.push_back(slice_state(st, 0, wl, scheme.low().budget_bits(wl)));
    high_states.push_back(slice_state(st, wl, d, scheme.high().budget_bits(wh)));
  }
  const auto low = deliver(scheme.low(), low_states, slice_map(half_map, 0, wl), s_t, s_t1);
  const auto high = deliver(scheme.high(), high_states, slice_map(half_map, wl, d), s_t, s_t1);
  BitVec payload = low.payload();
  payload.append(high.payload());
  return Message(std::move(payload), s_t, s_t1);
}

BatchPayload share_decode(const Scheme& scheme, const WorkerState& state,
                          const std::optional<HalfMap>& half_map, const Message& msg,
                          const Shuffle& s_t, const Shuffle& s_t1) {
  const std::size_t d = state.dim_bits;
  const auto [wl, wh] = split_of(scheme, d);
  if (wh == 0) return decode(scheme.low(), state, half_map, msg, s_t, s_t1);
  if (wl == 0) return decode(scheme.high(), state, half_map, msg, s_t, s_t1);

  // The cut point in the message follows from the shuffles alone.
  const auto cut = message_bits(scheme.low(), wl, s_t, s_t1);
  auto low = decode(scheme.low(), slice_state(state, 0, wl, scheme.low().budget_bits(wl)),
                    slice_map(half_map, 0, wl), slice_message(msg, 0, cut), s_t, s_t1);
  auto high = decode(scheme.high(), slice_state(state, wl, d, scheme.high().budget_bits(wh)),
                     slice_map(half_map, wl, d),
                     slice_message(msg, cut, msg.length_bits()), s_t, s_t1);
  for (auto& [x, bits] : low) {
    bits.append(high.at(x));
  }
  return low;
}

UpdateResult share_update(const Scheme& scheme, const WorkerState& state,
                          const std::optional<HalfMap>& half_map, const Message& msg,
                          const Shuffle& s_t, const Shuffle& s_t1) {
  const std::size_t d = state.dim_bits;
  const auto [wl, wh] = split_of(scheme, d);
  if (wh == 0) return update(scheme.low(), state, half_map, msg, s_t, s_t1);
  if (wl == 0) return update(scheme.high(), state, half_map, msg, s_t, s_t1);

  const auto cut = message_bits(scheme.low(), wl, s_t, s_t1);
  auto low = update(scheme.low(), slice_state(state, 0, wl, scheme.low().budget_bits(wl)),
                    slice_map(half_map, 0, wl), slice_message(msg, 0, cut), s_t, s_t1);
  auto high = update(scheme.high(), slice_state(state, wl, d, scheme.high().budget_bits(wh)),
                     slice_map(half_map, wl, d),
                     slice_message(msg, cut, msg.length_bits()), s_t, s_t1);
  UpdateResult out;
  out.state = join_states(low.state, high.state);
  out.halves = std::move(low.halves);
  for (const auto& f : high.halves) {
    out.halves.push_back(Fragment{f.point_id, f.dim_lo + wl, f.dim_hi + wl, f.holder});
  }
  return out;
}

}  // namespace cds::detail
