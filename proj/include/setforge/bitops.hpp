#pragma once

#include <bit>
#include <cassert>
#include <cstdint>

// Word-level primitives shared by the Patricia set: masks, prefixes,
// branch-bit discovery and bit reversal on 64-bit unsigned words.
//
// All functions are total unless a precondition is stated; preconditions
// are asserted in debug builds and must be established by the caller.

namespace setforge::bits {

using word = std::uint64_t;

inline constexpr int word_size = 64;

// A tip covers 64 consecutive keys: the low 6 bits select the bit inside
// the tip's bitmap, everything above is the tip prefix.
inline constexpr word suffix_bit_mask = 63;

// 2^j for the least significant set bit j of x.  Pre: x != 0.
inline constexpr word lowest_bit_mask(word x) {
    assert(x != 0 && "lowest_bit_mask: zero input");
    return word{1} << std::countr_zero(x);
}

// 2^floor(log2 x).  Pre: x != 0.
inline constexpr word highest_bit_mask(word x) {
    assert(x != 0 && "highest_bit_mask: zero input");
    return std::bit_floor(x);
}

// Index j such that x == 2^j.  Pre: exactly one bit of x is set.
inline constexpr int index_of_only_bit(word x) {
    assert(std::has_single_bit(x) && "index_of_only_bit: not a power of two");
    return std::countr_zero(x);
}

// Keeps the bits of x strictly above the mask bit; bits at and below the
// mask position are cleared.  Pre: m is a power of two.
inline constexpr word mask(word x, word m) {
    assert(std::has_single_bit(m) && "mask: mask must be a power of two");
    return x & ~(m | (m - 1));
}

// True iff the mask bit of x is clear.  Pre: m is a power of two.
inline constexpr bool zero(word x, word m) {
    assert(std::has_single_bit(m) && "zero: mask must be a power of two");
    return (x & m) == 0;
}

// True iff x does not share the prefix p above the mask bit m.
// Pre: m is a power of two and p has the mask bit and everything below it
// cleared (mask(p, m) == p).
inline constexpr bool nomatch(word x, word p, word m) {
    assert(std::has_single_bit(m) && "nomatch: mask must be a power of two");
    assert(mask(p, m) == p && "nomatch: prefix has bits at or below the mask");
    return mask(x, m) != p;
}

// The highest bit at which p1 and p2 differ, as a single-bit mask.
// Pre: p1 != p2.
inline constexpr word branch_mask(word p1, word p2) {
    assert(p1 != p2 && "branch_mask: equal prefixes");
    return highest_bit_mask(p1 ^ p2);
}

// Decomposition of a key into the prefix of its tip, the bit index inside
// the tip, and the single-bit bitmap for that index.
// prefix_of(x) + suffix_of(x) == x holds for all x.
inline constexpr word prefix_of(word x) { return x & ~suffix_bit_mask; }
inline constexpr int suffix_of(word x) { return static_cast<int>(x & suffix_bit_mask); }
inline constexpr word bitmap_of(word x) { return word{1} << suffix_of(x); }

// Bit reversal: bit j of the input becomes bit 63-j of the output.
// Five swap stages followed by a 32-bit rotate.
inline constexpr word rev_word(word x) {
    x = ((x >> 1) & 0x5555555555555555ULL) | ((x & 0x5555555555555555ULL) << 1);
    x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
    x = ((x >> 8) & 0x00FF00FF00FF00FFULL) | ((x & 0x00FF00FF00FF00FFULL) << 8);
    x = ((x >> 16) & 0x0000FFFF0000FFFFULL) | ((x & 0x0000FFFF0000FFFFULL) << 16);
    return (x >> 32) | (x << 32);
}

// Calls f(index) for every set bit of bm in ascending index order, by
// clearing the lowest set bit each step.
template <typename F>
constexpr void for_each_bit_asc(word bm, F&& f) {
    while (bm != 0) {
        const word bit = lowest_bit_mask(bm);
        f(index_of_only_bit(bit));
        bm ^= bit;
    }
}

// Calls f(index) for every set bit of bm in descending index order, by
// reversing the word and extracting lowest bits.
template <typename F>
constexpr void for_each_bit_desc(word bm, F&& f) {
    word rev = rev_word(bm);
    while (rev != 0) {
        const word bit = lowest_bit_mask(rev);
        f(word_size - 1 - index_of_only_bit(bit));
        rev ^= bit;
    }
}

}  // namespace setforge::bits
