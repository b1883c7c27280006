#pragma once

#include "cds/schemes.hpp"

namespace cds::detail {

Placement share_init(const Scheme& scheme, const Dataset& data, const Shuffle& s0);
Message share_deliver(const Scheme& scheme, std::span<const WorkerState> states,
                      const std::optional<HalfMap>& half_map, const Shuffle& s_t,
                      const Shuffle& s_t1);
BatchPayload share_decode(const Scheme& scheme, const WorkerState& state,
                          const std::optional<HalfMap>& half_map, const Message& msg,
                          const Shuffle& s_t, const Shuffle& s_t1);
UpdateResult share_update(const Scheme& scheme, const WorkerState& state,
                          const std::optional<HalfMap>& half_map, const Message& msg,
                          const Shuffle& s_t, const Shuffle& s_t1);

}  // namespace cds::detail
