#include "cds/harness.hpp"

#include <algorithm>
#include <set>

#include "cds/errors.hpp"

namespace cds {

namespace {

std::string worker_label(WorkerId k) { return "worker " + std::to_string(k); }

}  // namespace

SimulationRun::SimulationRun(Scheme scheme, Dataset data, Shuffle initial)
    : scheme_(std::move(scheme)),
      data_(std::move(data)),
      current_(std::move(initial)),
      placement_(init_placement(scheme_, data_, current_)) {
  check_storage();
}

RateRecord SimulationRun::step(const Shuffle& next) {
  if (next.n_points() != current_.n_points() || next.k_workers() != current_.k_workers()) {
    throw std::invalid_argument("next shuffle " + next.to_string() +
                                " has the wrong shape for this run");
  }
  const auto& states = placement_.states;
  const Message msg = deliver(scheme_, states, placement_.half_map, current_, next);

  for (const auto& st : states) {
    const auto got = decode(scheme_, st, placement_.half_map, msg, current_, next);
    const auto want = next.batch(st.worker_id);
    if (got.size() != want.size()) {
      throw InvariantViolation("decodability", worker_label(st.worker_id) + " decoded " +
                                                   std::to_string(got.size()) + " points, needs " +
                                                   std::to_string(want.size()));
    }
    for (PointId x : want) {
      auto it = got.find(x);
      if (it == got.end() || it->second != data_.point(x)) {
        throw InvariantViolation("decodability", worker_label(st.worker_id) +
                                                     " did not recover point " +
                                                     std::to_string(x) + " bit-exactly");
      }
    }
  }

  std::vector<WorkerState> next_states;
  std::vector<std::vector<Fragment>> contributions;
  for (const auto& st : states) {
    auto result = update(scheme_, st, placement_.half_map, msg, current_, next);
    next_states.push_back(std::move(result.state));
    contributions.push_back(std::move(result.halves));
  }

  placement_.states = std::move(next_states);
  if (placement_.half_map) {
    placement_.half_map = HalfMap::assemble(next, data_.dim_bits(), contributions);
  }
  RateRecord rec{history_.size() + 1,
                 static_cast<std::int64_t>(msg.length_bits()),
                 msg.rate_points(data_.dim_bits()),
                 current_,
                 next};
  current_ = next;
  check_storage();
  history_.push_back(rec);
  return rec;
}

void SimulationRun::check_storage() const {
  for (const auto& st : placement_.states) {
    if (st.stored_bits() > st.budget_bits) {
      throw InvariantViolation("budget", worker_label(st.worker_id) + " stores " +
                                             std::to_string(st.stored_bits()) + " bits, budget " +
                                             std::to_string(st.budget_bits));
    }
    if (st.has_overlap()) {
      throw InvariantViolation("storage-overlap",
                               worker_label(st.worker_id) + " stores overlapping fragments");
    }
    const auto want = current_.batch(st.worker_id);
    if (st.processing.size() != want.size()) {
      throw InvariantViolation("processing", worker_label(st.worker_id) +
                                                 " holds the wrong number of batch points");
    }
    for (PointId x : want) {
      auto it = st.processing.find(x);
      if (it == st.processing.end() || it->second != data_.point(x)) {
        throw InvariantViolation("processing", worker_label(st.worker_id) +
                                                   " cannot reproduce batch point " +
                                                   std::to_string(x));
      }
    }
    for (const auto& f : st.excess) {
      const auto& fr = f.fragment;
      if (fr.holder != st.worker_id ||
          f.bits != data_.point(fr.point_id).slice(fr.dim_lo, fr.dim_hi)) {
        throw InvariantViolation("storage-content", worker_label(st.worker_id) +
                                                        " holds a corrupted fragment of point " +
                                                        std::to_string(fr.point_id));
      }
    }
  }
  if (scheme_.id() == SchemeId::K3TwoThirds &&
      !verify_structural_invariance(placement_.states, *placement_.half_map, current_, data_)) {
    throw InvariantViolation("structural-invariance",
                             "half placement broken under shuffle " + current_.to_string());
  }
}

std::vector<RateRecord> run_chain(const Scheme& scheme, std::size_t n, std::size_t d,
                                  std::uint64_t seed, std::size_t iterations) {
  std::mt19937_64 rng(seed);
  auto data = make_dataset(n, d, rng());
  auto initial = cds::random_shuffle(n, scheme.k_workers(), rng);
  SimulationRun run(scheme, std::move(data), std::move(initial));
  for (std::size_t i = 0; i < iterations; ++i) {
    run.step(cds::random_shuffle(n, scheme.k_workers(), rng));
  }
  return run.history();
}

RateRecord transition_rate(const Scheme& scheme, const Dataset& data, const Shuffle& from,
                           const Shuffle& to) {
  SimulationRun run(scheme, data, from);
  return run.step(to);
}

namespace {

std::vector<Shuffle> shuffles_within_cap(const Scheme& scheme, std::uint64_t max_pairs) {
  const auto count = count_shuffles(scheme.n_points(), scheme.k_workers());
  if (!count || *count > UINT32_MAX || *count * *count > max_pairs) {
    const std::uint64_t pairs = count && *count <= UINT32_MAX ? *count * *count : UINT64_MAX;
    throw EnumerationCapExceeded("shuffle pairs", pairs, max_pairs);
  }
  return enumerate_shuffles(scheme.n_points(), scheme.k_workers(), *count);
}

}  // namespace

void for_each_transition(const Scheme& scheme, const Dataset& data,
                         const std::function<void(const RateRecord&)>& visit,
                         std::uint64_t max_pairs) {
  const auto shuffles = shuffles_within_cap(scheme, max_pairs);
  for (const auto& from : shuffles) {
    const SimulationRun base(scheme, data, from);
    for (const auto& to : shuffles) {
      SimulationRun run = base;
      visit(run.step(to));
    }
  }
}

WorstCaseReport worst_case_search(const Scheme& scheme, std::size_t n, std::size_t d,
                                  std::uint64_t max_pairs, std::uint64_t seed) {
  if (n != scheme.n_points()) {
    throw std::invalid_argument("scheme is for N=" + std::to_string(scheme.n_points()) +
                                ", search asked for N=" + std::to_string(n));
  }
  const auto data = make_dataset(n, d, seed);
  const auto shuffles = shuffles_within_cap(scheme, max_pairs);
  validate_dimensions(scheme, d);

  WorstCaseReport report;
  for (const auto& from : shuffles) {
    for (const auto& to : shuffles) {
      RateRecord rec{0, 0, Rational(0), from, to};
      try {
        rec = transition_rate(scheme, data, from, to);
      } catch (const std::exception& e) {
        report.all_decoded = false;
        report.failing_pair.emplace(from, to);
        report.failure = e.what();
        return report;
      }
      ++report.pairs_checked;
      // Strict comparison keeps the first (lexicographically smallest) maximiser.
      if (!report.argmax_pair || rec.rate_points > report.max_rate_points) {
        report.max_rate_points = rec.rate_points;
        report.argmax_pair.emplace(from, to);
      }
    }
  }
  return report;
}

bool verify_structural_invariance(std::span<const WorkerState> states, const HalfMap& half_map,
                                  const Shuffle& shuffle, const Dataset& data) {
  const std::size_t d = data.dim_bits();
  if (d % 2 != 0 || half_map.dim_bits() != d || !half_map.matches(shuffle) ||
      states.size() != shuffle.k_workers()) {
    return false;
  }
  const std::size_t h = d / 2;
  for (PointId x = 0; x < shuffle.n_points(); ++x) {
    const WorkerId p = shuffle.worker_of(x);
    const auto& truth = data.point(x);
    const auto& entry = half_map.entry(x);
    if (entry.halves.size() != states.size() - 1) return false;

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::set<WorkerId> holders;
    for (const auto& f : entry.halves) {
      if (f.point_id != x || f.holder == p || f.holder >= states.size() || f.length() != h ||
          f.dim_hi > d) {
        return false;
      }
      holders.insert(f.holder);
      ranges.emplace_back(f.dim_lo, f.dim_hi);
    }
    if (holders.size() != entry.halves.size()) return false;
    std::sort(ranges.begin(), ranges.end());
    std::size_t covered = 0;
    for (const auto& [lo, hi] : ranges) {
      if (lo != covered) return false;
      covered = hi;
    }
    if (covered != d) return false;

    for (const auto& st : states) {
      if (st.worker_id == p) {
        auto it = st.processing.find(x);
        if (it == st.processing.end() || it->second != truth) return false;
        continue;
      }
      if (st.processing.contains(x)) return false;
      // Exactly one excess fragment of x, equal to the mapped half and to ground truth.
      const StoredFragment* held = nullptr;
      for (const auto& sf : st.excess) {
        if (sf.fragment.point_id != x) continue;
        if (held) return false;
        held = &sf;
      }
      if (!held) return false;
      const auto expected =
          std::find_if(entry.halves.begin(), entry.halves.end(),
                       [&](const Fragment& f) { return f.holder == st.worker_id; });
      if (expected == entry.halves.end() || held->fragment != *expected ||
          held->bits != truth.slice(expected->dim_lo, expected->dim_hi)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace cds
