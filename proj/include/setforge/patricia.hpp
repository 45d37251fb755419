#pragma once

#include <atomic>
#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "setforge/bitops.hpp"
#include "setforge/faults.hpp"

// Persistent big-endian Patricia tree set over 64-bit unsigned keys.
//
// A tree is a shared_ptr to an immutable node; the empty set is null.
// An interior node branches on its mask bit, the highest bit at which two
// elements of the set differ; the prefix holds the bits all elements share
// above it.  A leaf stores membership for 64 consecutive keys as a bitmap.
// A given key set has exactly one well-formed representation, so equals
// can compare structurally.
//
// The library constructors route through bin/tip, which collapse empty
// results, so an empty child can never appear under an interior node.
// make_bin/make_tip build nodes verbatim for parsers and checker tests.

namespace setforge::pt {

using bits::word;

struct node;
using tree = std::shared_ptr<const node>;

struct node {
    bool is_bin = false;
    word prefix = 0;
    word mask = 0;    // interior only; a single bit when well formed
    word bitmap = 0;  // leaf only; nonzero when well formed
    tree left;        // interior only
    tree right;
};

inline tree make_bin(word prefix, word mask, tree l, tree r) {
    return std::make_shared<const node>(node{true, prefix, mask, 0, std::move(l), std::move(r)});
}

inline tree make_tip(word prefix, word bitmap) {
    return std::make_shared<const node>(node{false, prefix, 0, bitmap, nullptr, nullptr});
}

// Smart constructors: tip drops empty bitmaps, bin drops empty children.
inline tree tip(word prefix, word bitmap) {
    if (bitmap == 0) return {};
    return make_tip(prefix, bitmap);
}

inline tree bin(word prefix, word mask, tree l, tree r) {
    if (!l) return r;
    if (!r) return l;
    return make_bin(prefix, mask, std::move(l), std::move(r));
}

// A numerically larger mask bit means a shorter shared prefix.
inline bool shorter(word m1, word m2) {
    return m1 > m2;
}

inline bool is_empty(const tree& t) {
    return !t;
}

inline std::int64_t size(const tree& t) {
    if (!t) return 0;
    if (!t->is_bin) return std::popcount(t->bitmap);
    return size(t->left) + size(t->right);
}

inline tree singleton(word x) {
    return make_tip(bits::prefix_of(x), bits::bitmap_of(x));
}

namespace detail {

// Descends to the tip whose prefix matches kx, or null if none exists.
inline const node* lookup_tip(const node* cur, word kx) {
    while (cur && cur->is_bin) {
        if (bits::nomatch(kx, cur->prefix, cur->mask)) return nullptr;
        cur = bits::zero(kx, cur->mask) ? cur->left.get() : cur->right.get();
    }
    if (cur && cur->prefix == kx) return cur;
    return nullptr;
}

}  // namespace detail

inline bool member(const tree& t, word x) {
    const node* tp = detail::lookup_tip(t.get(), bits::prefix_of(x));
    return tp != nullptr && (tp->bitmap & bits::bitmap_of(x)) != 0;
}

inline bool not_member(const tree& t, word x) {
    return !member(t, x);
}

// Joins two trees whose prefixes disagree; p1 and p2 are representative
// keys or prefixes of t1 and t2.  The branch bit orders the children.
inline tree link_trees(word p1, tree t1, word p2, tree t2) {
    const word m = bits::branch_mask(p1, p2);
    const word p = bits::mask(p1, m);
    if (bits::zero(p1, m)) return make_bin(p, m, std::move(t1), std::move(t2));
    return make_bin(p, m, std::move(t2), std::move(t1));
}

namespace detail {

// Merges the tip (kx, bm) into t.  Returns t itself when nothing changed.
inline tree insert_bitmap(word kx, word bm, const tree& t) {
    if (!t) return make_tip(kx, bm);
    if (t->is_bin) {
        if (bits::nomatch(kx, t->prefix, t->mask))
            return link_trees(kx, make_tip(kx, bm), t->prefix, t);
        if (bits::zero(kx, t->mask)) {
            tree l2 = insert_bitmap(kx, bm, t->left);
            if (l2.get() == t->left.get()) return t;
            return make_bin(t->prefix, t->mask, std::move(l2), t->right);
        }
        tree r2 = insert_bitmap(kx, bm, t->right);
        if (r2.get() == t->right.get()) return t;
        return make_bin(t->prefix, t->mask, t->left, std::move(r2));
    }
    if (t->prefix == kx) {
        if ((t->bitmap | bm) == t->bitmap) return t;
        return make_tip(kx, t->bitmap | bm);
    }
    return link_trees(kx, make_tip(kx, bm), t->prefix, t);
}

// Removes the bits of (kx, bm) from t.  Returns t itself when nothing
// changed; never leaves an empty child under an interior node.
inline tree erase_bitmap(word kx, word bm, const tree& t) {
    if (!t) return t;
    if (t->is_bin) {
        if (bits::nomatch(kx, t->prefix, t->mask)) return t;
        if (bits::zero(kx, t->mask)) {
            tree l2 = erase_bitmap(kx, bm, t->left);
            if (l2.get() == t->left.get()) return t;
            return bin(t->prefix, t->mask, std::move(l2), t->right);
        }
        tree r2 = erase_bitmap(kx, bm, t->right);
        if (r2.get() == t->right.get()) return t;
        return bin(t->prefix, t->mask, t->left, std::move(r2));
    }
    if (t->prefix == kx) {
        const word nb = t->bitmap & ~bm;
        if (nb == t->bitmap) return t;
        return tip(kx, nb);
    }
    return t;
}

}  // namespace detail

// Inserting a present key returns the input tree itself.
inline tree insert(const tree& t, word x) {
    return detail::insert_bitmap(bits::prefix_of(x), bits::bitmap_of(x), t);
}

// Erasing an absent key returns the input tree itself.
inline tree erase(const tree& t, word x) {
    return detail::erase_bitmap(bits::prefix_of(x), bits::bitmap_of(x), t);
}

inline tree set_union(const tree& t1, const tree& t2) {
    if (!t1) return t2;
    if (!t2) return t1;
    if (t1->is_bin && t2->is_bin) {
        const bool drop_nomatch = faults::pt_union_drop_nomatch.load(std::memory_order_relaxed);
        if (shorter(t1->mask, t2->mask)) {
            if (!drop_nomatch && bits::nomatch(t2->prefix, t1->prefix, t1->mask))
                return link_trees(t1->prefix, t1, t2->prefix, t2);
            if (bits::zero(t2->prefix, t1->mask))
                return make_bin(t1->prefix, t1->mask, set_union(t1->left, t2), t1->right);
            return make_bin(t1->prefix, t1->mask, t1->left, set_union(t1->right, t2));
        }
        if (shorter(t2->mask, t1->mask)) {
            if (!drop_nomatch && bits::nomatch(t1->prefix, t2->prefix, t2->mask))
                return link_trees(t1->prefix, t1, t2->prefix, t2);
            if (bits::zero(t1->prefix, t2->mask))
                return make_bin(t2->prefix, t2->mask, set_union(t1, t2->left), t2->right);
            return make_bin(t2->prefix, t2->mask, t2->left, set_union(t1, t2->right));
        }
        if (t1->prefix == t2->prefix)
            return make_bin(t1->prefix, t1->mask, set_union(t1->left, t2->left),
                            set_union(t1->right, t2->right));
        return link_trees(t1->prefix, t1, t2->prefix, t2);
    }
    if (!t2->is_bin) return detail::insert_bitmap(t2->prefix, t2->bitmap, t1);
    return detail::insert_bitmap(t1->prefix, t1->bitmap, t2);
}

inline tree set_intersection(const tree& t1, const tree& t2) {
    if (!t1 || !t2) return {};
    if (t1->is_bin && t2->is_bin) {
        if (shorter(t1->mask, t2->mask)) {
            if (bits::nomatch(t2->prefix, t1->prefix, t1->mask)) return {};
            return bits::zero(t2->prefix, t1->mask) ? set_intersection(t1->left, t2)
                                                    : set_intersection(t1->right, t2);
        }
        if (shorter(t2->mask, t1->mask)) {
            if (bits::nomatch(t1->prefix, t2->prefix, t2->mask)) return {};
            return bits::zero(t1->prefix, t2->mask) ? set_intersection(t1, t2->left)
                                                    : set_intersection(t1, t2->right);
        }
        if (t1->prefix == t2->prefix)
            return bin(t1->prefix, t1->mask, set_intersection(t1->left, t2->left),
                       set_intersection(t1->right, t2->right));
        return {};
    }
    const node* tp = !t1->is_bin ? t1.get() : t2.get();
    const tree& other = !t1->is_bin ? t2 : t1;
    const node* match = detail::lookup_tip(other.get(), tp->prefix);
    if (!match) return {};
    if (faults::pt_intersection_wrong_bitmap_op.load(std::memory_order_relaxed))
        return tip(tp->prefix, tp->bitmap | match->bitmap);
    return tip(tp->prefix, tp->bitmap & match->bitmap);
}

inline tree set_difference(const tree& t1, const tree& t2) {
    if (!t1) return {};
    if (!t2) return t1;
    if (t1->is_bin && t2->is_bin) {
        if (shorter(t1->mask, t2->mask)) {
            if (bits::nomatch(t2->prefix, t1->prefix, t1->mask)) return t1;
            if (bits::zero(t2->prefix, t1->mask)) {
                tree l2 = set_difference(t1->left, t2);
                if (l2.get() == t1->left.get()) return t1;
                return bin(t1->prefix, t1->mask, std::move(l2), t1->right);
            }
            tree r2 = set_difference(t1->right, t2);
            if (r2.get() == t1->right.get()) return t1;
            return bin(t1->prefix, t1->mask, t1->left, std::move(r2));
        }
        if (shorter(t2->mask, t1->mask)) {
            if (bits::nomatch(t1->prefix, t2->prefix, t2->mask)) return t1;
            return bits::zero(t1->prefix, t2->mask) ? set_difference(t1, t2->left)
                                                    : set_difference(t1, t2->right);
        }
        if (t1->prefix == t2->prefix)
            return bin(t1->prefix, t1->mask, set_difference(t1->left, t2->left),
                       set_difference(t1->right, t2->right));
        return t1;
    }
    if (!t2->is_bin) return detail::erase_bitmap(t2->prefix, t2->bitmap, t1);
    // t1 is a tip, t2 interior
    const node* match = detail::lookup_tip(t2.get(), t1->prefix);
    if (!match) return t1;
    const word nb = t1->bitmap & ~match->bitmap;
    if (nb == t1->bitmap) return t1;
    return tip(t1->prefix, nb);
}

inline bool disjoint(const tree& t1, const tree& t2) {
    if (!t1 || !t2) return true;
    if (t1->is_bin && t2->is_bin) {
        if (shorter(t1->mask, t2->mask)) {
            if (bits::nomatch(t2->prefix, t1->prefix, t1->mask)) return true;
            return bits::zero(t2->prefix, t1->mask) ? disjoint(t1->left, t2)
                                                    : disjoint(t1->right, t2);
        }
        if (shorter(t2->mask, t1->mask)) {
            if (bits::nomatch(t1->prefix, t2->prefix, t2->mask)) return true;
            return bits::zero(t1->prefix, t2->mask) ? disjoint(t1, t2->left)
                                                    : disjoint(t1, t2->right);
        }
        if (t1->prefix == t2->prefix)
            return disjoint(t1->left, t2->left) && disjoint(t1->right, t2->right);
        return true;
    }
    const node* tp = !t1->is_bin ? t1.get() : t2.get();
    const tree& other = !t1->is_bin ? t2 : t1;
    const node* match = detail::lookup_tip(other.get(), tp->prefix);
    return match == nullptr || (tp->bitmap & match->bitmap) == 0;
}

inline bool is_subset_of(const tree& t1, const tree& t2) {
    if (!t1) return true;
    if (!t2) return false;
    if (t1->is_bin) {
        if (!t2->is_bin) return false;
        if (shorter(t1->mask, t2->mask)) return false;
        if (shorter(t2->mask, t1->mask)) {
            if (bits::nomatch(t1->prefix, t2->prefix, t2->mask)) return false;
            return bits::zero(t1->prefix, t2->mask) ? is_subset_of(t1, t2->left)
                                                    : is_subset_of(t1, t2->right);
        }
        return t1->prefix == t2->prefix && is_subset_of(t1->left, t2->left) &&
               is_subset_of(t1->right, t2->right);
    }
    const node* match = detail::lookup_tip(t2.get(), t1->prefix);
    return match != nullptr && (t1->bitmap & ~match->bitmap) == 0;
}

// Structural equality; sound because the representation is unique.
inline bool equals(const tree& t1, const tree& t2) {
    if (t1.get() == t2.get()) return true;
    if (!t1 || !t2) return false;
    if (t1->is_bin != t2->is_bin) return false;
    if (t1->is_bin)
        return t1->prefix == t2->prefix && t1->mask == t2->mask && equals(t1->left, t2->left) &&
               equals(t1->right, t2->right);
    return t1->prefix == t2->prefix && t1->bitmap == t2->bitmap;
}

inline bool is_proper_subset_of(const tree& t1, const tree& t2) {
    return is_subset_of(t1, t2) && !equals(t1, t2);
}

// Ascending key traversal: interior nodes left before right, tip bitmaps
// by increasing bit index.
template <typename F>
void for_each_asc(const tree& t, F&& f) {
    std::vector<const node*> stack;
    if (t) stack.push_back(t.get());
    while (!stack.empty()) {
        const node* n = stack.back();
        stack.pop_back();
        if (n->is_bin) {
            if (n->right) stack.push_back(n->right.get());
            if (n->left) stack.push_back(n->left.get());
        } else {
            bits::for_each_bit_asc(n->bitmap, [&](int j) { f(n->prefix + static_cast<word>(j)); });
        }
    }
}

template <typename F>
void for_each_desc(const tree& t, F&& f) {
    std::vector<const node*> stack;
    if (t) stack.push_back(t.get());
    while (!stack.empty()) {
        const node* n = stack.back();
        stack.pop_back();
        if (n->is_bin) {
            if (n->left) stack.push_back(n->left.get());
            if (n->right) stack.push_back(n->right.get());
        } else {
            bits::for_each_bit_desc(n->bitmap, [&](int j) { f(n->prefix + static_cast<word>(j)); });
        }
    }
}

inline std::vector<word> to_asc_list(const tree& t) {
    std::vector<word> out;
    out.reserve(static_cast<std::size_t>(size(t)));
    for_each_asc(t, [&](word k) { out.push_back(k); });
    return out;
}

inline std::vector<word> to_desc_list(const tree& t) {
    std::vector<word> out;
    out.reserve(static_cast<std::size_t>(size(t)));
    for_each_desc(t, [&](word k) { out.push_back(k); });
    return out;
}

inline std::vector<word> to_list(const tree& t) {
    return to_asc_list(t);
}

inline std::vector<word> elems(const tree& t) {
    return to_asc_list(t);
}

template <typename A, typename F>
A fold_left(const tree& t, A z, F&& f) {
    for_each_asc(t, [&](word k) { z = f(std::move(z), k); });
    return z;
}

template <typename A, typename F>
A fold_right(const tree& t, A z, F&& f) {
    for_each_desc(t, [&](word k) { z = f(k, std::move(z)); });
    return z;
}

inline tree from_list(std::span<const word> xs) {
    tree t;
    for (word x : xs) t = insert(t, x);
    return t;
}

inline tree from_list(const std::vector<word>& xs) {
    return from_list(std::span<const word>(xs));
}

template <typename Pred>
tree filter(const tree& t, Pred&& p) {
    if (!t) return t;
    if (t->is_bin) {
        tree l2 = filter(t->left, p);
        tree r2 = filter(t->right, p);
        if (l2.get() == t->left.get() && r2.get() == t->right.get()) return t;
        return bin(t->prefix, t->mask, std::move(l2), std::move(r2));
    }
    word nb = 0;
    bits::for_each_bit_asc(t->bitmap, [&](int j) {
        if (p(t->prefix + static_cast<word>(j))) nb |= word{1} << j;
    });
    if (nb == t->bitmap) return t;
    return tip(t->prefix, nb);
}

template <typename Pred>
std::pair<tree, tree> partition(const tree& t, Pred&& p) {
    if (!t) return {tree{}, tree{}};
    if (t->is_bin) {
        auto [l1, l2] = partition(t->left, p);
        auto [r1, r2] = partition(t->right, p);
        return {bin(t->prefix, t->mask, std::move(l1), std::move(r1)),
                bin(t->prefix, t->mask, std::move(l2), std::move(r2))};
    }
    word kept = 0;
    bits::for_each_bit_asc(t->bitmap, [&](int j) {
        if (p(t->prefix + static_cast<word>(j))) kept |= word{1} << j;
    });
    return {tip(t->prefix, kept), tip(t->prefix, t->bitmap ^ kept)};
}

// Arbitrary key function; the result is rebuilt by re-insertion.
template <typename F>
tree map_keys(const tree& t, F&& f) {
    tree out;
    for_each_asc(t, [&](word k) { out = insert(out, f(k)); });
    return out;
}

// Keys below x, keys above x; x itself is dropped from both parts.
inline std::pair<tree, tree> split(const tree& t, word x) {
    if (!t) return {tree{}, tree{}};
    if (t->is_bin) {
        if (bits::nomatch(x, t->prefix, t->mask)) {
            if (x < t->prefix) return {tree{}, t};
            return {t, tree{}};
        }
        if (bits::zero(x, t->mask)) {
            auto [lt, gt] = split(t->left, x);
            return {std::move(lt), set_union(gt, t->right)};
        }
        auto [lt, gt] = split(t->right, x);
        return {set_union(t->left, lt), std::move(gt)};
    }
    if (t->prefix > x) return {tree{}, t};
    if (t->prefix < bits::prefix_of(x)) return {t, tree{}};
    const word bit = bits::bitmap_of(x);
    const word lower = bit - 1;
    const word higher = ~(lower | bit);
    return {tip(t->prefix, t->bitmap & lower), tip(t->prefix, t->bitmap & higher)};
}

struct split_result {
    tree below;
    bool found = false;
    tree above;
};

inline split_result split_member(const tree& t, word x) {
    if (!t) return {};
    if (t->is_bin) {
        if (bits::nomatch(x, t->prefix, t->mask)) {
            if (x < t->prefix) return {tree{}, false, t};
            return {t, false, tree{}};
        }
        if (bits::zero(x, t->mask)) {
            auto sub = split_member(t->left, x);
            return {std::move(sub.below), sub.found, set_union(sub.above, t->right)};
        }
        auto sub = split_member(t->right, x);
        return {set_union(t->left, sub.below), sub.found, std::move(sub.above)};
    }
    if (t->prefix > x) return {tree{}, false, t};
    if (t->prefix < bits::prefix_of(x)) return {t, false, tree{}};
    const word bit = bits::bitmap_of(x);
    const word lower = bit - 1;
    const word higher = ~(lower | bit);
    return {tip(t->prefix, t->bitmap & lower), (t->bitmap & bit) != 0,
            tip(t->prefix, t->bitmap & higher)};
}

// Lexicographic order on the ascending key sequences.
inline std::strong_ordering compare_sets(const tree& t1, const tree& t2) {
    const auto a = to_asc_list(t1);
    const auto b = to_asc_list(t2);
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return a[i] <=> b[i];
    }
    return a.size() <=> b.size();
}

inline tree unions(std::span<const tree> ts) {
    tree acc;
    for (const tree& t : ts) acc = set_union(acc, t);
    return acc;
}

inline tree unions(const std::vector<tree>& ts) {
    return unions(std::span<const tree>(ts));
}

}  // namespace setforge::pt
