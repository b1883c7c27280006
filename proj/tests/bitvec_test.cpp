#include "cds/bitvec.hpp"

#include <array>
#include <random>

#include <gtest/gtest.h>

using cds::BitVec;

namespace {

BitVec random_bits(std::mt19937_64& rng, std::size_t n) {
  BitVec v(n);
  for (std::size_t i = 0; i < n; ++i) v.set(i, rng() & 1U);
  return v;
}

}  // namespace

TEST(BitVec, StringRoundTripAndSlicing) {
  const auto v = BitVec::from_string("110100");
  EXPECT_EQ(v.size(), 6u);
  EXPECT_EQ(v.to_string(), "110100");
  EXPECT_EQ(v.slice(1, 4).to_string(), "101");
  EXPECT_EQ(v.slice(3, 3).size(), 0u);
  EXPECT_THROW(v.slice(4, 7), std::out_of_range);
  EXPECT_THROW(BitVec::from_string("10a"), std::invalid_argument);

  auto w = v.slice(0, 2);
  w.append(v.slice(2, 6));
  EXPECT_EQ(w, v);
}

TEST(XorFold, SameLengthOperands) {
  const std::array ops{BitVec::from_string("1010"), BitVec::from_string("0110")};
  EXPECT_EQ(cds::xor_fold(ops).to_string(), "1100");
}

TEST(XorFold, ShorterOperandIsPaddedAtTheTail) {
  const std::array ops{BitVec::from_string("1010"), BitVec::from_string("01")};
  EXPECT_EQ(cds::xor_fold(ops).to_string(), "1110");
}

TEST(XorFold, RejectsEmptyOperandList) {
  EXPECT_THROW(cds::xor_fold({}), std::invalid_argument);
}

TEST(XorFold, AlgebraicLawsOnRandomVectors) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_bits(rng, rng() % 40);
    const auto b = random_bits(rng, rng() % 40);
    const auto c = random_bits(rng, rng() % 40);

    // Self-inverse.
    const std::array aa{a, a};
    EXPECT_TRUE(cds::xor_fold(aa).none());
    EXPECT_EQ(cds::xor_fold(aa).size(), a.size());

    // Commutative.
    const std::array ab{a, b};
    const std::array ba{b, a};
    EXPECT_EQ(cds::xor_fold(ab), cds::xor_fold(ba));

    // Associative: (a^b)^c == a^(b^c) == fold(a, b, c).
    const std::array bc{b, c};
    const std::array left{cds::xor_fold(ab), c};
    const std::array right{a, cds::xor_fold(bc)};
    const std::array abc{a, b, c};
    EXPECT_EQ(cds::xor_fold(left), cds::xor_fold(right));
    EXPECT_EQ(cds::xor_fold(left), cds::xor_fold(abc));

    // Result length is the longest operand.
    EXPECT_EQ(cds::xor_fold(abc).size(), std::max({a.size(), b.size(), c.size()}));

    // Cancelling one operand recovers the other, zero-extended.
    auto recovered = cds::xor_fold(ab);
    recovered ^= b;
    EXPECT_EQ(recovered.slice(0, a.size()), a);
    EXPECT_TRUE(recovered.slice(a.size(), recovered.size()).none());
  }
}
