#include "cds/schemes.hpp"

#include <gtest/gtest.h>

#include "cds/errors.hpp"
#include "oracles.hpp"

using namespace cds;

namespace {

const Shuffle kIdentity3({0, 1, 2}, 3);
// Example transition: worker 0 takes x2, worker 1 takes x0, worker 2 takes x1.
const Shuffle kRotated3({1, 2, 0}, 3);

BatchPayload truth_batch(const Dataset& data, const Shuffle& s, WorkerId k) {
  BatchPayload out;
  for (auto x : s.batch(k)) out[x] = data.point(x);
  return out;
}

/// Delivers once and checks every worker decodes its new batch; returns the message.
Message deliver_and_check(const Scheme& scheme, const Dataset& data, const Placement& p,
                          const Shuffle& from, const Shuffle& to) {
  auto msg = deliver(scheme, p.states, p.half_map, from, to);
  EXPECT_EQ(msg.length_bits(), message_bits(scheme, data.dim_bits(), from, to));
  for (const auto& st : p.states) {
    EXPECT_EQ(decode(scheme, st, p.half_map, msg, from, to), truth_batch(data, to, st.worker_id))
        << scheme.name() << " worker " << st.worker_id << " " << from.to_string() << " -> "
        << to.to_string();
  }
  return msg;
}

}  // namespace

TEST(Scheme, CornerStorageValues) {
  EXPECT_EQ(Scheme::full_storage(3, 6).storage_points(), Rational(6));
  EXPECT_EQ(Scheme::k2_min(4).storage_points(), Rational(2));
  EXPECT_EQ(Scheme::k3_min(6).storage_points(), Rational(2));
  EXPECT_EQ(Scheme::k3_two_thirds(6).storage_points(), Rational(4));
  EXPECT_THROW(Scheme::k2_min(5), std::invalid_argument);
  EXPECT_THROW(Scheme::k3_two_thirds(4), std::invalid_argument);
}

TEST(Scheme, MemoryShareStorageIsConvexCombination) {
  const auto s = Scheme::memory_share(Scheme::k3_min(6), Scheme::k3_two_thirds(6), Rational(1, 2));
  EXPECT_EQ(s.storage_points(), Rational(3));
  EXPECT_EQ(s.budget_bits(12), 36u);
  EXPECT_EQ(s.low_width(12), 6u);
  EXPECT_THROW(Scheme::memory_share(Scheme::k3_min(6), Scheme::k2_min(6), Rational(1, 2)),
               std::invalid_argument);
  EXPECT_THROW(Scheme::memory_share(Scheme::k3_min(6), Scheme::k3_min(6), Rational(3, 2)),
               std::invalid_argument);
}

TEST(Scheme, DimensionValidation) {
  EXPECT_THROW(validate_dimensions(Scheme::k3_two_thirds(3), 3), DivisibilityError);
  const auto share =
      Scheme::memory_share(Scheme::k3_min(3), Scheme::k3_two_thirds(3), Rational(1, 2));
  EXPECT_NO_THROW(validate_dimensions(share, 4));
  EXPECT_THROW(validate_dimensions(share, 2), DivisibilityError) << "odd two-thirds slice";
  EXPECT_THROW(validate_dimensions(share, 3), DivisibilityError) << "non-integral split";
  const auto third =
      Scheme::memory_share(Scheme::k3_min(3), Scheme::full_storage(3, 3), Rational(1, 3));
  EXPECT_THROW(validate_dimensions(third, 4), DivisibilityError);
  EXPECT_NO_THROW(validate_dimensions(third, 6));
}

TEST(Scheme, SelectionPicksCornersOrNeighbouringShare) {
  EXPECT_EQ(select_scheme(2, 4, Rational(2)).id(), SchemeId::K2Min);
  EXPECT_EQ(select_scheme(2, 4, Rational(4)).id(), SchemeId::FullStorage);
  EXPECT_EQ(select_scheme(3, 6, Rational(2)).id(), SchemeId::K3Min);
  EXPECT_EQ(select_scheme(3, 6, Rational(4)).id(), SchemeId::K3TwoThirds);

  const auto mid = select_scheme(3, 6, Rational(3));
  ASSERT_EQ(mid.id(), SchemeId::MemoryShare);
  EXPECT_EQ(mid.low().id(), SchemeId::K3Min);
  EXPECT_EQ(mid.high().id(), SchemeId::K3TwoThirds);
  EXPECT_EQ(mid.alpha(), Rational(1, 2));
  EXPECT_EQ(mid.storage_points(), Rational(3));

  const auto upper = select_scheme(3, 6, Rational(11, 2));
  EXPECT_EQ(upper.low().id(), SchemeId::K3TwoThirds);
  EXPECT_EQ(upper.high().id(), SchemeId::FullStorage);
  EXPECT_EQ(upper.storage_points(), Rational(11, 2));

  EXPECT_THROW(select_scheme(3, 6, Rational(1)), std::invalid_argument);
  EXPECT_THROW(select_scheme(4, 8, Rational(4)), std::invalid_argument);
}

TEST(InitPlacement, TwoThirdsExampleLayout) {
  const auto data = make_dataset(3, 2, 5);
  const auto scheme = Scheme::k3_two_thirds(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  ASSERT_TRUE(p.half_map.has_value());

  // Worker 1 holds x1 fully plus one half of each of x0 and x2.
  const auto& w1 = p.states[1];
  EXPECT_EQ(w1.processing.size(), 1u);
  EXPECT_EQ(w1.processing.at(1), data.point(1));
  ASSERT_EQ(w1.excess.size(), 2u);
  EXPECT_EQ(w1.excess[0].fragment, (Fragment{0, 0, 1, 1}));
  EXPECT_EQ(w1.excess[1].fragment, (Fragment{2, 1, 2, 1}));
  EXPECT_EQ(w1.excess[0].bits, data.point(0).slice(0, 1));
  EXPECT_EQ(w1.excess[1].bits, data.point(2).slice(1, 2));
  for (const auto& st : p.states) {
    EXPECT_EQ(st.stored_bits(), 2u * 2u);
    EXPECT_EQ(st.stored_bits(), st.budget_bits);
  }
}

TEST(InitPlacement, FullStorageHoldsEverything) {
  const auto data = make_dataset(3, 4, 1);
  const auto p = init_placement(Scheme::full_storage(3, 3), data, kIdentity3);
  for (const auto& st : p.states) {
    EXPECT_EQ(st.stored_bits(), 12u);
    for (PointId x = 0; x < 3; ++x) EXPECT_EQ(st.read(x, 0, 4), data.point(x));
  }
  EXPECT_EQ(deliver(Scheme::full_storage(3, 3), p.states, p.half_map, kIdentity3, kRotated3)
                .length_bits(),
            0u);
}

TEST(InitPlacement, K2MinStoresOnlyTheBatch) {
  const auto data = make_dataset(4, 8, 2);
  const Shuffle s0({0, 0, 1, 1}, 2);
  const auto p = init_placement(Scheme::k2_min(4), data, s0);
  EXPECT_FALSE(p.half_map.has_value());
  const auto& w0 = p.states[0];
  EXPECT_TRUE(w0.excess.empty());
  EXPECT_EQ(w0.processing.size(), 2u);
  EXPECT_TRUE(w0.processing.contains(0));
  EXPECT_TRUE(w0.processing.contains(1));
  EXPECT_EQ(w0.stored_bits(), 16u);
  EXPECT_EQ(w0.budget_bits, 16u);
}

TEST(InitPlacement, RejectsMismatchedInputs) {
  const auto data = make_dataset(6, 2, 0);
  EXPECT_THROW(init_placement(Scheme::k3_min(3), data, kIdentity3), std::invalid_argument);
  EXPECT_THROW(init_placement(Scheme::k2_min(6), data, Shuffle({0, 0, 1, 1, 2, 2}, 3)),
               ProtocolError);
  const auto share =
      Scheme::memory_share(Scheme::k3_min(6), Scheme::k3_two_thirds(6), Rational(1, 2));
  EXPECT_THROW(init_placement(share, data, Shuffle({0, 0, 1, 1, 2, 2}, 3)), DivisibilityError);
}

TEST(Deliver, TwoThirdsExampleMessage) {
  for (std::size_t d : {2u, 8u}) {
    const auto data = make_dataset(3, d, 17);
    const auto scheme = Scheme::k3_two_thirds(3);
    const auto p = init_placement(scheme, data, kIdentity3);
    const auto msg = deliver_and_check(scheme, data, p, kIdentity3, kRotated3);

    // x2's half at worker 1, x0's half at worker 2, x1's half at worker 0.
    const std::size_t h = d / 2;
    BitVec expected = data.point(2).slice(h, d);
    expected ^= data.point(0).slice(h, d);
    expected ^= data.point(1).slice(0, h);
    EXPECT_EQ(msg.payload(), expected);
    EXPECT_EQ(msg.length_bits(), h);
    EXPECT_EQ(msg.rate_points(d), Rational(1, 2));
  }
}

TEST(Deliver, K2MinUnchangedShuffleSendsNothing) {
  const auto data = make_dataset(4, 8, 3);
  const Shuffle s({0, 1, 0, 1}, 2);
  const auto p = init_placement(Scheme::k2_min(4), data, s);
  EXPECT_EQ(deliver(Scheme::k2_min(4), p.states, p.half_map, s, s).length_bits(), 0u);
}

TEST(Deliver, TwoThirdsCyclicRotationCostsOnePoint) {
  const auto data = make_dataset(6, 4, 3);
  const auto scheme = Scheme::k3_two_thirds(6);
  const Shuffle from({0, 0, 1, 1, 2, 2}, 3);
  const Shuffle to({1, 1, 2, 2, 0, 0}, 3);
  const auto p = init_placement(scheme, data, from);
  const auto msg = deliver_and_check(scheme, data, p, from, to);
  EXPECT_EQ(msg.length_bits(), 4u);
  EXPECT_EQ(msg.rate_points(4), Rational(1));
}

TEST(Deliver, RejectsStatesFromAnotherShuffle) {
  const auto data = make_dataset(3, 2, 3);
  const auto scheme = Scheme::k3_min(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  EXPECT_THROW(deliver(scheme, p.states, p.half_map, kRotated3, kIdentity3), ProtocolError);

  const auto two = Scheme::k3_two_thirds(3);
  const auto q = init_placement(two, data, kIdentity3);
  EXPECT_THROW(deliver(two, q.states, std::nullopt, kIdentity3, kRotated3), ProtocolError);
}

TEST(Decode, K2MinSwapRecoversOtherBatch) {
  const auto data = make_dataset(4, 8, 9);
  const Shuffle from({0, 0, 1, 1}, 2);
  const Shuffle to({1, 1, 0, 0}, 2);
  const auto scheme = Scheme::k2_min(4);
  const auto p = init_placement(scheme, data, from);
  const auto msg = deliver(scheme, p.states, p.half_map, from, to);

  std::vector<BitVec> both{data.point(0), data.point(1)};
  BitVec a1 = concat(both);
  both = {data.point(2), data.point(3)};
  a1 ^= concat(both);
  EXPECT_EQ(msg.payload(), a1) << "A_1 xor A_2 when nothing stays";

  const auto got = decode(scheme, p.states[0], p.half_map, msg, from, to);
  EXPECT_EQ(got, truth_batch(data, to, 0));
}

TEST(Decode, FullStorageIgnoresMessage) {
  const auto data = make_dataset(3, 2, 9);
  const auto scheme = Scheme::full_storage(3, 3);
  const auto p = init_placement(scheme, data, kIdentity3);
  const Message empty(BitVec(), kIdentity3, kRotated3);
  EXPECT_EQ(decode(scheme, p.states[2], p.half_map, empty, kIdentity3, kRotated3),
            truth_batch(data, kRotated3, 2));
}

TEST(Decode, TwoThirdsExampleWorkerZero) {
  const auto data = make_dataset(3, 8, 21);
  const auto scheme = Scheme::k3_two_thirds(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  const auto msg = deliver(scheme, p.states, p.half_map, kIdentity3, kRotated3);
  const auto got = decode(scheme, p.states[0], p.half_map, msg, kIdentity3, kRotated3);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got.at(2), data.point(2));
}

TEST(Decode, MissingFragmentIsAProtocolViolation) {
  const auto data = make_dataset(3, 8, 21);
  const auto scheme = Scheme::k3_two_thirds(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  const auto msg = deliver(scheme, p.states, p.half_map, kIdentity3, kRotated3);
  // Worker 0 needs its half of x1 to cancel worker 2's operand.
  auto damaged = p.states[0];
  std::erase_if(damaged.excess, [](const StoredFragment& f) { return f.fragment.point_id == 1; });
  EXPECT_THROW(decode(scheme, damaged, p.half_map, msg, kIdentity3, kRotated3), ProtocolError);
}

TEST(Decode, RejectsMessageOfWrongTransitionOrLength) {
  const auto data = make_dataset(3, 2, 4);
  const auto scheme = Scheme::k3_min(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  const auto msg = deliver(scheme, p.states, p.half_map, kIdentity3, kRotated3);
  EXPECT_THROW(decode(scheme, p.states[0], p.half_map, msg, kIdentity3, kIdentity3),
               ProtocolError);
  const Message shortened(msg.payload().slice(0, 2), kIdentity3, kRotated3);
  EXPECT_THROW(decode(scheme, p.states[0], p.half_map, shortened, kIdentity3, kRotated3),
               ProtocolError);
}

TEST(Update, TwoThirdsExampleFollowsRelabelRule) {
  const auto data = make_dataset(3, 2, 33);
  const auto scheme = Scheme::k3_two_thirds(3);
  const auto p = init_placement(scheme, data, kIdentity3);
  const auto msg = deliver(scheme, p.states, p.half_map, kIdentity3, kRotated3);

  std::vector<UpdateResult> next;
  for (const auto& st : p.states) {
    next.push_back(update(scheme, st, p.half_map, msg, kIdentity3, kRotated3));
  }
  // x2 moved from worker 2 to worker 0. Worker 0 now processes it fully.
  EXPECT_EQ(next[0].state.processing.at(2), data.point(2));
  // Worker 1 keeps its half of x2 unchanged.
  EXPECT_NE(std::find(next[1].halves.begin(), next[1].halves.end(), Fragment{2, 1, 2, 1}),
            next[1].halves.end());
  // Worker 2 keeps the range worker 0 used to hold, relabelled as its own.
  EXPECT_NE(std::find(next[2].halves.begin(), next[2].halves.end(), Fragment{2, 0, 1, 2}),
            next[2].halves.end());
  EXPECT_EQ(next[2].state.read(2, 0, 1), data.point(2).slice(0, 1));
  EXPECT_FALSE(next[2].state.processing.contains(2));

  for (const auto& r : next) {
    EXPECT_EQ(r.state.stored_bits(), r.state.budget_bits);
    EXPECT_FALSE(r.state.has_overlap());
  }
}

TEST(Update, IdentityShuffleChangesNothing) {
  const auto data = make_dataset(6, 4, 8);
  const Shuffle s({2, 0, 1, 0, 2, 1}, 3);
  for (const auto& scheme : {Scheme::k3_two_thirds(6), Scheme::k3_min(6),
                             Scheme::full_storage(3, 6)}) {
    const auto p = init_placement(scheme, data, s);
    const auto msg = deliver(scheme, p.states, p.half_map, s, s);
    std::vector<std::vector<Fragment>> halves;
    for (const auto& st : p.states) {
      auto r = update(scheme, st, p.half_map, msg, s, s);
      EXPECT_EQ(r.state, st) << scheme.name();
      halves.push_back(r.halves);
    }
    if (p.half_map) {
      EXPECT_EQ(HalfMap::assemble(s, 4, halves), *p.half_map);
    }
  }
}

TEST(Update, DependsOnlyOnOwnStorage) {
  const auto data = make_dataset(6, 4, 8);
  const Shuffle from({0, 0, 1, 1, 2, 2}, 3);
  const Shuffle to({1, 2, 0, 2, 1, 0}, 3);
  const auto scheme = Scheme::k3_two_thirds(6);
  auto p = init_placement(scheme, data, from);
  const auto msg = deliver(scheme, p.states, p.half_map, from, to);
  const auto before = update(scheme, p.states[0], p.half_map, msg, from, to);

  // Scramble every foreign worker's stored bits.
  for (std::size_t k = 1; k < 3; ++k) {
    for (auto& [x, bits] : p.states[k].processing) bits = BitVec(bits.size());
    for (auto& f : p.states[k].excess) f.bits = BitVec(f.bits.size());
  }
  const auto after = update(scheme, p.states[0], p.half_map, msg, from, to);
  EXPECT_EQ(before.state, after.state);
  EXPECT_EQ(before.halves, after.halves);
}

TEST(MessageLength, MatchesClosedFormsOnEveryPair) {
  // Rate oracles are computed straight from the assignment vectors.
  const auto data2 = make_dataset(4, 6, 1);
  for (const auto& from : enumerate_shuffles(4, 2)) {
    const auto p = init_placement(Scheme::k2_min(4), data2, from);
    for (const auto& to : enumerate_shuffles(4, 2)) {
      const auto msg = deliver_and_check(Scheme::k2_min(4), data2, p, from, to);
      EXPECT_EQ(msg.rate_points(6), oracle::k2_rate(from.assignment(), to.assignment()));
    }
  }
  const auto data3 = make_dataset(3, 4, 1);
  for (const auto& from : enumerate_shuffles(3, 3)) {
    const auto p = init_placement(Scheme::k3_two_thirds(3), data3, from);
    const auto q = init_placement(Scheme::k3_min(3), data3, from);
    for (const auto& to : enumerate_shuffles(3, 3)) {
      const auto msg = deliver_and_check(Scheme::k3_two_thirds(3), data3, p, from, to);
      EXPECT_EQ(msg.rate_points(4),
                oracle::k3_two_thirds_rate(from.assignment(), to.assignment()));
      EXPECT_EQ(deliver_and_check(Scheme::k3_min(3), data3, q, from, to).rate_points(4),
                Rational(2));
    }
  }
}

TEST(MemoryShare, SlicesRunIndependently) {
  const auto data = make_dataset(6, 12, 4);
  const auto scheme =
      Scheme::memory_share(Scheme::k3_min(6), Scheme::k3_two_thirds(6), Rational(1, 2));
  const Shuffle from({0, 0, 1, 1, 2, 2}, 3);
  const Shuffle to({1, 1, 2, 2, 0, 0}, 3);
  const auto p = init_placement(scheme, data, from);
  for (const auto& st : p.states) EXPECT_EQ(st.stored_bits(), 36u);
  ASSERT_TRUE(p.half_map.has_value());
  for (const auto& e : p.half_map->entries()) {
    for (const auto& f : e.halves) EXPECT_GE(f.dim_lo, 6u) << "halves live in the high slice";
  }

  const auto msg = deliver_and_check(scheme, data, p, from, to);
  // K3Min on 6 bits: 2*(N/3)*6 = 24; two-thirds on 6 bits with m=2: 2*3 = 6.
  EXPECT_EQ(msg.length_bits(), 30u);
  EXPECT_EQ(msg.rate_points(12), Rational(5, 2));

  for (const auto& st : p.states) {
    const auto r = update(scheme, st, p.half_map, msg, from, to);
    EXPECT_EQ(r.state.stored_bits(), 36u);
    EXPECT_EQ(r.state.processing, truth_batch(data, to, st.worker_id));
  }
}

TEST(MemoryShare, DegenerateWeightsDelegate) {
  const auto data = make_dataset(3, 4, 4);
  const auto all_low =
      Scheme::memory_share(Scheme::k3_two_thirds(3), Scheme::full_storage(3, 3), Rational(1));
  const auto p = init_placement(all_low, data, kIdentity3);
  EXPECT_EQ(deliver_and_check(all_low, data, p, kIdentity3, kRotated3).rate_points(4),
            Rational(1, 2));

  const auto all_high =
      Scheme::memory_share(Scheme::k3_two_thirds(3), Scheme::full_storage(3, 3), Rational(0));
  const auto q = init_placement(all_high, data, kIdentity3);
  EXPECT_EQ(deliver_and_check(all_high, data, q, kIdentity3, kRotated3).length_bits(), 0u);
}

TEST(MemoryShare, NestedSharesDecode) {
  const auto data = make_dataset(3, 8, 6);
  const auto inner =
      Scheme::memory_share(Scheme::k3_min(3), Scheme::k3_two_thirds(3), Rational(1, 2));
  const auto outer = Scheme::memory_share(inner, Scheme::full_storage(3, 3), Rational(1, 2));
  EXPECT_EQ(outer.storage_points(), Rational(9, 4));
  for (const auto& from : enumerate_shuffles(3, 3)) {
    const auto p = init_placement(outer, data, from);
    for (const auto& to : enumerate_shuffles(3, 3)) {
      deliver_and_check(outer, data, p, from, to);
    }
  }
}
