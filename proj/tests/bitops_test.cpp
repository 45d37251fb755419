#include "setforge/bitops.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "setforge/script.hpp"

namespace bits = setforge::bits;
using setforge::script::rng;
using word = std::uint64_t;

namespace {

// Naive per-bit reference implementations.
word naive_lowest(word x) {
    for (int j = 0; j < 64; ++j)
        if (x & (word{1} << j)) return word{1} << j;
    return 0;
}

word naive_highest(word x) {
    for (int j = 63; j >= 0; --j)
        if (x & (word{1} << j)) return word{1} << j;
    return 0;
}

word naive_rev(word x) {
    word out = 0;
    for (int j = 0; j < 64; ++j)
        if (x & (word{1} << j)) out |= word{1} << (63 - j);
    return out;
}

word naive_mask(word x, word m) {
    const int b = std::countr_zero(m);
    word out = 0;
    for (int j = b + 1; j < 64; ++j) out |= x & (word{1} << j);
    return out;
}

}  // namespace

TEST(Bitops, LowestBitMask) {
    EXPECT_EQ(bits::lowest_bit_mask(0b1), 0b1u);
    EXPECT_EQ(bits::lowest_bit_mask(0b1010), naive_lowest(0b1010));
    EXPECT_EQ(bits::lowest_bit_mask(0b1010), 0b10u);
    EXPECT_EQ(bits::lowest_bit_mask(word{1} << 63), word{1} << 63);
}

TEST(Bitops, HighestBitMask) {
    EXPECT_EQ(bits::highest_bit_mask(0b1), 0b1u);
    EXPECT_EQ(bits::highest_bit_mask(0b1010), naive_highest(0b1010));
    EXPECT_EQ(bits::highest_bit_mask(0b1010), 0b1000u);
    EXPECT_EQ(bits::highest_bit_mask((word{1} << 63) + 1), naive_highest((word{1} << 63) + 1));
    EXPECT_EQ(bits::highest_bit_mask((word{1} << 63) + 1), word{1} << 63);
}

TEST(Bitops, IndexOfOnlyBit) {
    EXPECT_EQ(bits::index_of_only_bit(1), 0);
    EXPECT_EQ(bits::index_of_only_bit(word{1} << 5), 5);
    EXPECT_EQ(bits::index_of_only_bit(word{1} << 63), 63);
}

TEST(Bitops, Mask) {
    EXPECT_EQ(bits::mask(13, 4), 8u);
    EXPECT_EQ(bits::mask(13, 4), naive_mask(13, 4));
    EXPECT_EQ(bits::mask(0xdeadbeef, word{1} << 63), 0u);
    EXPECT_EQ(bits::mask(0b101000, 0b1000), 0b100000u);
    EXPECT_EQ(bits::mask(0b101000, 0b1000), naive_mask(0b101000, 0b1000));
}

TEST(Bitops, ZeroAndNomatch) {
    EXPECT_TRUE(bits::zero(3, 4));
    EXPECT_FALSE(bits::zero(4, 4));
    EXPECT_FALSE(bits::zero(12, 4));
    EXPECT_FALSE(bits::nomatch(5, 0, 8));
    EXPECT_TRUE(bits::nomatch(21, 0, 8));
    // An element equal to its own clean prefix matches it.
    const word p = bits::mask(21, 8);
    EXPECT_FALSE(bits::nomatch(p, p, 8));
}

TEST(Bitops, BranchMask) {
    EXPECT_EQ(bits::branch_mask(0, 1), 1u);
    EXPECT_EQ(bits::branch_mask(0b1010, 0b1000), 0b10u);
    EXPECT_EQ(bits::branch_mask(0, word{1} << 63), word{1} << 63);
}

TEST(Bitops, PrefixSuffixBitmap) {
    EXPECT_EQ(bits::prefix_of(67), 64u);
    EXPECT_EQ(bits::suffix_of(67), 3);
    EXPECT_EQ(bits::bitmap_of(67), 8u);
    EXPECT_EQ(bits::prefix_of(0), 0u);
    EXPECT_EQ(bits::suffix_of(0), 0);
    EXPECT_EQ(bits::bitmap_of(0), 1u);
    EXPECT_EQ(bits::prefix_of(63), 0u);
    EXPECT_EQ(bits::suffix_of(63), 63);
    EXPECT_EQ(bits::bitmap_of(63), word{1} << 63);
}

TEST(Bitops, RevWordExamples) {
    EXPECT_EQ(bits::rev_word(0), 0u);
    EXPECT_EQ(bits::rev_word(1), word{1} << 63);
    EXPECT_EQ(bits::rev_word(1), naive_rev(1));
    EXPECT_EQ(bits::rev_word(0xF), 0xF000000000000000ull);
    EXPECT_EQ(bits::rev_word(0xF), naive_rev(0xF));
}

TEST(Bitops, RevWordSingleBits) {
    for (int j = 0; j < 64; ++j)
        EXPECT_EQ(bits::rev_word(word{1} << j), word{1} << (63 - j));
}

TEST(Bitops, RandomAgainstOracles) {
    rng r(0xb170f5);
    for (int i = 0; i < 20000; ++i) {
        const word x = r.next();
        EXPECT_EQ(bits::rev_word(bits::rev_word(x)), x);
        EXPECT_EQ(bits::rev_word(x), naive_rev(x));
        if (x != 0) {
            EXPECT_EQ(bits::lowest_bit_mask(x), naive_lowest(x));
            EXPECT_EQ(bits::highest_bit_mask(x), naive_highest(x));
            EXPECT_NE(bits::lowest_bit_mask(x) & x, 0u);
            EXPECT_NE(bits::highest_bit_mask(x) & x, 0u);
        }
        const word m = word{1} << r.below(64);
        EXPECT_EQ(bits::mask(x, m), naive_mask(x, m));
        EXPECT_EQ(bits::zero(x, m), (x & m) == 0);
        EXPECT_EQ(bits::prefix_of(x) + static_cast<word>(bits::suffix_of(x)), x);
        EXPECT_EQ(bits::prefix_of(x) & 63, 0u);
        const word y = r.next();
        EXPECT_EQ(x & ~y, x ^ (x & y));  // and-not as xor of the overlap
        if (x != y) {
            const word bm = bits::branch_mask(x, y);
            EXPECT_EQ(bits::mask(x, bm), bits::mask(y, bm));
            EXPECT_NE(bits::zero(x, bm), bits::zero(y, bm));
        }
    }
}

TEST(Bitops, BitIterationOrders) {
    rng r(0x17e5);
    for (int i = 0; i < 10000; ++i) {
        const word bm = r.next();
        std::vector<int> asc, desc, naive;
        bits::for_each_bit_asc(bm, [&](int j) { asc.push_back(j); });
        bits::for_each_bit_desc(bm, [&](int j) { desc.push_back(j); });
        for (int j = 0; j < 64; ++j)
            if (bm & (word{1} << j)) naive.push_back(j);
        EXPECT_EQ(asc, naive);
        std::vector<int> rev(naive.rbegin(), naive.rend());
        EXPECT_EQ(desc, rev);
    }
}
