#include "prunebound/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace prunebound;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
    const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
    const PhiloxCounter out =
        philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
    const PhiloxCounter out =
        philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngHandle, SameHandleSameSequence) {
    Rng a(RngHandle{42, 7});
    Rng b(RngHandle{42, 7});
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngHandle, DerivedStreamsDiffer) {
    const RngHandle root{1, 0};
    std::set<std::uint64_t> firsts;
    for (std::uint64_t i = 0; i < 64; ++i) firsts.insert(bits_at(root.derive(i), 0));
    EXPECT_EQ(firsts.size(), 64u);
    EXPECT_EQ(root.derive(3), root.derive(3));
    EXPECT_FALSE(root.derive(3) == root.derive(4));
}

TEST(RngHandle, RandomAccessMatchesSequential) {
    const RngHandle h{9, 2};
    Rng r(h);
    for (std::uint64_t k = 0; k < 10; ++k) EXPECT_EQ(r.uniform(), uniform_at(h, k));
    EXPECT_EQ(r.position(), 10u);
}

TEST(RngHandle, UniformAndNormalMoments) {
    const RngHandle h{123, 0};
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int k = 0; k < n; ++k) {
        const double u = uniform_at(h, k);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = normal_at(h, k);
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sn / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(sn2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, BelowStaysInRange) {
    Rng r(RngHandle{5, 5});
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = r.below(7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
}
