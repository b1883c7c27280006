#include "cds/half_map.hpp"

#include <algorithm>

#include "cds/errors.hpp"

namespace cds {

HalfMap HalfMap::initial(const Shuffle& s0, std::size_t dim_bits) {
  if (dim_bits == 0 || dim_bits % 2 != 0) {
    throw DivisibilityError("half placement needs an even point width, got " +
                            std::to_string(dim_bits));
  }
  const std::size_t half = dim_bits / 2;
  std::vector<Entry> entries;
  entries.reserve(s0.n_points());
  for (PointId x = 0; x < s0.n_points(); ++x) {
    Entry e;
    e.processor = s0.worker_of(x);
    std::size_t next_lo = 0;
    for (WorkerId w = 0; w < s0.k_workers(); ++w) {
      if (w == e.processor) continue;
      e.halves.push_back(Fragment{x, next_lo, next_lo + half, w});
      next_lo += half;
    }
    entries.push_back(std::move(e));
  }
  return HalfMap(dim_bits, std::move(entries));
}

HalfMap HalfMap::assemble(const Shuffle& s, std::size_t dim_bits,
                          std::span<const std::vector<Fragment>> contributions) {
  std::vector<Entry> entries(s.n_points());
  for (PointId x = 0; x < s.n_points(); ++x) {
    entries[x].processor = s.worker_of(x);
  }
  for (const auto& from_worker : contributions) {
    for (const auto& f : from_worker) {
      if (f.point_id >= entries.size()) {
        throw ProtocolError("reported half for unknown point " + std::to_string(f.point_id));
      }
      entries[f.point_id].halves.push_back(f);
    }
  }
  for (auto& e : entries) {
    std::sort(e.halves.begin(), e.halves.end(), [](const Fragment& a, const Fragment& b) {
      return std::tie(a.dim_lo, a.holder) < std::tie(b.dim_lo, b.holder);
    });
  }
  return HalfMap(dim_bits, std::move(entries));
}

Fragment HalfMap::half_at(PointId x, WorkerId w) const {
  const auto& e = entry(x);
  const Fragment* found = nullptr;
  for (const auto& f : e.halves) {
    if (f.holder != w) continue;
    if (found) {
      throw ProtocolError("worker " + std::to_string(w) + " holds several halves of point " +
                          std::to_string(x));
    }
    found = &f;
  }
  if (!found) {
    throw ProtocolError("worker " + std::to_string(w) + " holds no half of point " +
                        std::to_string(x));
  }
  return *found;
}

Fragment HalfMap::half_not_at(PointId x, WorkerId w) const {
  const auto& e = entry(x);
  const Fragment* found = nullptr;
  for (const auto& f : e.halves) {
    if (f.holder == w) continue;
    if (found) {
      throw ProtocolError("point " + std::to_string(x) + " has several halves outside worker " +
                          std::to_string(w));
    }
    found = &f;
  }
  if (!found) {
    throw ProtocolError("point " + std::to_string(x) + " has no half outside worker " +
                        std::to_string(w));
  }
  return *found;
}

HalfMap HalfMap::slice(std::size_t lo, std::size_t hi) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    Entry s;
    s.processor = e.processor;
    for (const auto& f : e.halves) {
      if (f.dim_lo >= lo && f.dim_hi <= hi) {
        s.halves.push_back(Fragment{f.point_id, f.dim_lo - lo, f.dim_hi - lo, f.holder});
      } else if (f.dim_lo < hi && lo < f.dim_hi) {
        throw ProtocolError("half of point " + std::to_string(f.point_id) +
                            " straddles slice boundary");
      }
    }
    out.push_back(std::move(s));
  }
  return HalfMap(hi - lo, std::move(out));
}

bool HalfMap::matches(const Shuffle& s) const {
  if (s.n_points() != entries_.size()) return false;
  for (PointId x = 0; x < entries_.size(); ++x) {
    if (entries_[x].processor != s.worker_of(x)) return false;
  }
  return true;
}

std::optional<HalfMap> join_half_maps(const std::optional<HalfMap>& low, std::size_t low_width,
                                      const std::optional<HalfMap>& high,
                                      std::size_t high_width) {
  if (!low && !high) return std::nullopt;
  const auto& any = low ? *low : *high;
  std::vector<HalfMap::Entry> entries(any.n_points());
  for (PointId x = 0; x < entries.size(); ++x) {
    entries[x].processor = any.entry(x).processor;
    if (low) {
      const auto& h = low->entry(x).halves;
      entries[x].halves.insert(entries[x].halves.end(), h.begin(), h.end());
    }
    if (high) {
      for (const auto& f : high->entry(x).halves) {
        entries[x].halves.push_back(
            Fragment{f.point_id, f.dim_lo + low_width, f.dim_hi + low_width, f.holder});
      }
    }
  }
  return HalfMap(low_width + high_width, std::move(entries));
}

}  // namespace cds
