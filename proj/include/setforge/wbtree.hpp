#pragma once

#include <atomic>
#include <cassert>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "setforge/faults.hpp"

// Persistent weight-balanced binary search tree set.
//
// A tree is a shared_ptr to an immutable node; the empty tree is null.
// Every operation returns a new tree and leaves its inputs untouched, so
// trees may be shared freely across threads.  Unchanged subtrees are
// reused, and an operation that has no effect (inserting a present
// element, erasing an absent one) returns a tree sharing the input's root
// node, observable through tree::get().
//
// The element order is supplied as a three-way comparison functor; it
// must be a lawful linear order.

namespace setforge::wb {

struct default_order {
    template <typename U>
    std::strong_ordering operator()(const U& a, const U& b) const {
        if (a < b) return std::strong_ordering::less;
        if (b < a) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

template <typename T>
struct node;

template <typename T>
using tree = std::shared_ptr<const node<T>>;

template <typename T>
struct node {
    std::int64_t size;  // cached subtree size; 1 + size(left) + size(right) when well formed
    T elem;
    tree<T> left;
    tree<T> right;
};

// Balancing constants. delta bounds how unbalanced siblings may get,
// ratio picks between single and double rotations.
inline constexpr std::int64_t delta = 3;
inline constexpr std::int64_t ratio = 2;

template <typename T>
std::int64_t size(const tree<T>& t) {
    return t ? t->size : 0;
}

template <typename T>
bool is_empty(const tree<T>& t) {
    return !t;
}

// Unchecked node constructor; the stored size is taken as given.  Used by
// parsers and tests that need to build arbitrary (possibly corrupt) trees.
template <typename T>
tree<T> make_node(std::int64_t sz, T x, tree<T> l, tree<T> r) {
    return std::make_shared<const node<T>>(node<T>{sz, std::move(x), std::move(l), std::move(r)});
}

template <typename T>
tree<T> bin(T x, tree<T> l, tree<T> r) {
    const std::int64_t sz = 1 + size(l) + size(r);
    return make_node(sz, std::move(x), std::move(l), std::move(r));
}

template <typename T>
tree<T> single(T x) {
    return make_node(1, std::move(x), tree<T>{}, tree<T>{});
}

// bal(s1, s2): the balancing invariant between sibling subtree sizes.
inline bool balanced(std::int64_t s1, std::int64_t s2) {
    assert(s1 >= 0 && s2 >= 0);
    return s1 + s2 <= 1 || (s1 <= delta * s2 && s2 <= delta * s1);
}

// bal*(s1, s2): weaker one-sided condition; with delta = 3 this is
// 3*s1 <= 13*s2 together with s2 <= s1.
inline bool bal_star(std::int64_t s1, std::int64_t s2) {
    assert(s1 >= 0 && s2 >= 0);
    return delta * s1 <= (delta * delta + delta + 1) * s2 && s2 <= s1;
}

namespace audit {

// Observation hook for the rebalancing entry points.  When enabled, each
// balance_left/balance_right call records whether the precondition
//   (bal*(s1-1, s2) && 0 < s1) || bal(s1, s2) || bal(s1, s2+1)
// held, and whether the older variant with bal in place of bal* would
// have failed where this one held.
struct balance_stats {
    std::atomic<std::uint64_t> calls{0};
    std::atomic<std::uint64_t> violations{0};
    std::atomic<std::uint64_t> historical_only_failures{0};

    void reset() {
        calls = 0;
        violations = 0;
        historical_only_failures = 0;
    }
};

inline balance_stats& stats() {
    static balance_stats s;
    return s;
}

inline std::atomic<bool> enabled{false};

inline bool precondition(std::int64_t s1, std::int64_t s2) {
    return (s1 > 0 && bal_star(s1 - 1, s2)) || balanced(s1, s2) || balanced(s1, s2 + 1);
}

inline bool historical_precondition(std::int64_t s1, std::int64_t s2) {
    return (s1 > 0 && balanced(s1 - 1, s2)) || balanced(s1, s2) || balanced(s1, s2 + 1);
}

inline void record(std::int64_t s1, std::int64_t s2) {
    if (!enabled.load(std::memory_order_relaxed)) return;
    auto& s = stats();
    s.calls.fetch_add(1, std::memory_order_relaxed);
    const bool ok = precondition(s1, s2);
    if (!ok) s.violations.fetch_add(1, std::memory_order_relaxed);
    if (ok && !historical_precondition(s1, s2))
        s.historical_only_failures.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace audit

namespace detail {

inline void check_balance_pre(const char* fn, std::int64_t s1, std::int64_t s2) {
    audit::record(s1, s2);
#ifndef NDEBUG
    if (!audit::precondition(s1, s2)) {
        std::fprintf(stderr,
                     "%s precondition violated for sizes (%lld, %lld): "
                     "bal*(s1-1,s2)&&s1>0 = %d, bal(s1,s2) = %d, bal(s1,s2+1) = %d\n",
                     fn, static_cast<long long>(s1), static_cast<long long>(s2),
                     s1 > 0 && bal_star(s1 - 1, s2), balanced(s1, s2), balanced(s1, s2 + 1));
        std::abort();
    }
#else
    (void)fn;
    (void)s1;
    (void)s2;
#endif
}

}  // namespace detail

// Restores balance after the left subtree may have grown by one or the
// right subtree shrunk by one.  Precondition on sizes (s1, s2):
//   (bal*(s1-1, s2) && 0 < s1) || bal(s1, s2) || bal(s1, s2+1)
// asserted in debug builds.
template <typename T>
tree<T> balance_left(const T& x, const tree<T>& l, const tree<T>& r) {
    detail::check_balance_pre("balance_left", size(l), size(r));
    if (!r) {
        if (!l) return single(x);
        if (!l->left && !l->right) return make_node(2, x, l, tree<T>{});
        if (!l->left) return make_node(3, l->right->elem, single(l->elem), single(x));
        if (!l->right) return make_node(3, l->elem, l->left, single(x));
        const tree<T>& ll = l->left;
        const tree<T>& lr = l->right;
        if (lr->size < ratio * ll->size)
            return make_node(1 + l->size, l->elem, ll, make_node(1 + lr->size, x, lr, tree<T>{}));
        return make_node(1 + l->size, lr->elem,
                         make_node(1 + ll->size + size(lr->left), l->elem, ll, lr->left),
                         make_node(1 + size(lr->right), x, lr->right, tree<T>{}));
    }
    if (!l) return make_node(1 + r->size, x, tree<T>{}, r);
    if (l->size > delta * r->size) {
        const tree<T>& ll = l->left;
        const tree<T>& lr = l->right;
        assert(ll && lr && "balance_left: single-node left sibling cannot outweigh right");
        if (ll && lr) {
            if (lr->size < ratio * ll->size)
                return make_node(1 + l->size + r->size, l->elem, ll,
                                 make_node(1 + r->size + lr->size, x, lr, r));
            return make_node(1 + l->size + r->size, lr->elem,
                             make_node(1 + ll->size + size(lr->left), l->elem, ll, lr->left),
                             make_node(1 + r->size + size(lr->right), x, lr->right, r));
        }
    }
    return make_node(1 + l->size + r->size, x, l, r);
}

// Mirror image of balance_left: the right subtree may have grown by one
// or the left shrunk by one.
template <typename T>
tree<T> balance_right(const T& x, const tree<T>& l, const tree<T>& r) {
    detail::check_balance_pre("balance_right", size(r), size(l));
    if (!l) {
        if (!r) return single(x);
        if (!r->left && !r->right) return make_node(2, x, tree<T>{}, r);
        if (!r->left) return make_node(3, r->elem, single(x), r->right);
        if (!r->right) return make_node(3, r->left->elem, single(x), single(r->elem));
        const tree<T>& rl = r->left;
        const tree<T>& rr = r->right;
        if (rl->size < ratio * rr->size)
            return make_node(1 + r->size, r->elem, make_node(1 + rl->size, x, tree<T>{}, rl), rr);
        return make_node(1 + r->size, rl->elem,
                         make_node(1 + size(rl->left), x, tree<T>{}, rl->left),
                         make_node(1 + rr->size + size(rl->right), r->elem, rl->right, rr));
    }
    if (!r) return make_node(1 + l->size, x, l, tree<T>{});
    if (r->size > delta * l->size) {
        const tree<T>& rl = r->left;
        const tree<T>& rr = r->right;
        assert(rl && rr && "balance_right: single-node right sibling cannot outweigh left");
        if (rl && rr) {
            if (rl->size < ratio * rr->size)
                return make_node(1 + l->size + r->size, r->elem,
                                 make_node(1 + l->size + rl->size, x, l, rl), rr);
            return make_node(1 + l->size + r->size, rl->elem,
                             make_node(1 + l->size + size(rl->left), x, l, rl->left),
                             make_node(1 + rr->size + size(rl->right), r->elem, rl->right, rr));
        }
    }
    return make_node(1 + l->size + r->size, x, l, r);
}

template <typename T, typename Order = default_order>
bool member(const tree<T>& t, const T& x, Order ord = {}) {
    const node<T>* cur = t.get();
    while (cur) {
        const auto c = ord(x, cur->elem);
        if (c < 0)
            cur = cur->left.get();
        else if (c > 0)
            cur = cur->right.get();
        else
            return true;
    }
    return false;
}

template <typename T, typename Order = default_order>
bool not_member(const tree<T>& t, const T& x, Order ord = {}) {
    return !member(t, x, ord);
}

template <typename T>
std::optional<T> lookup_min(const tree<T>& t) {
    if (!t) return std::nullopt;
    const node<T>* cur = t.get();
    while (cur->left) cur = cur->left.get();
    return cur->elem;
}

template <typename T>
std::optional<T> lookup_max(const tree<T>& t) {
    if (!t) return std::nullopt;
    const node<T>* cur = t.get();
    while (cur->right) cur = cur->right.get();
    return cur->elem;
}

// Inserting a present element returns the input tree itself.
template <typename T, typename Order = default_order>
tree<T> insert(const tree<T>& t, const T& x, Order ord = {}) {
    if (!t) return single(x);
    const auto c = ord(x, t->elem);
    if (c < 0) {
        tree<T> l2 = insert(t->left, x, ord);
        if (l2.get() == t->left.get()) return t;
        if (faults::wb_insert_skip_rebalance.load(std::memory_order_relaxed))
            return bin(t->elem, std::move(l2), t->right);
        return balance_left(t->elem, l2, t->right);
    }
    if (c > 0) {
        tree<T> r2 = insert(t->right, x, ord);
        if (r2.get() == t->right.get()) return t;
        if (faults::wb_insert_skip_rebalance.load(std::memory_order_relaxed))
            return bin(t->elem, t->left, std::move(r2));
        return balance_right(t->elem, t->left, r2);
    }
    return t;
}

// Left-biased insert used by the union fast path; also keeps the
// existing element on a collision.
template <typename T, typename Order = default_order>
tree<T> insert_r(const tree<T>& t, const T& x, Order ord = {}) {
    if (!t) return single(x);
    const auto c = ord(x, t->elem);
    if (c < 0) {
        tree<T> l2 = insert_r(t->left, x, ord);
        if (l2.get() == t->left.get()) return t;
        return balance_left(t->elem, l2, t->right);
    }
    if (c > 0) {
        tree<T> r2 = insert_r(t->right, x, ord);
        if (r2.get() == t->right.get()) return t;
        return balance_right(t->elem, t->left, r2);
    }
    return t;
}

namespace detail {

// Extraction of the extreme element of a nonempty tree given as its parts.
template <typename T>
std::pair<T, tree<T>> min_view_sure(const T& x, const tree<T>& l, const tree<T>& r) {
    if (!l) return {x, r};
    auto [m, l2] = min_view_sure(l->elem, l->left, l->right);
    return {std::move(m), balance_right(x, l2, r)};
}

template <typename T>
std::pair<T, tree<T>> max_view_sure(const T& x, const tree<T>& l, const tree<T>& r) {
    if (!r) return {x, l};
    auto [m, r2] = max_view_sure(r->elem, r->left, r->right);
    return {std::move(m), balance_left(x, l, r2)};
}

}  // namespace detail

// Joins two trees where all of l < all of r and bal(size l, size r) holds.
template <typename T>
tree<T> glue(const tree<T>& l, const tree<T>& r) {
    if (!l) return r;
    if (!r) return l;
    if (l->size > r->size) {
        auto [m, l2] = detail::max_view_sure(l->elem, l->left, l->right);
        return balance_right(m, l2, r);
    }
    auto [m, r2] = detail::min_view_sure(r->elem, r->left, r->right);
    return balance_left(m, l, r2);
}

// Erasing an absent element returns the input tree itself.
template <typename T, typename Order = default_order>
tree<T> erase(const tree<T>& t, const T& x, Order ord = {}) {
    if (!t) return t;
    const auto c = ord(x, t->elem);
    if (c < 0) {
        tree<T> l2 = erase(t->left, x, ord);
        if (l2.get() == t->left.get()) return t;
        return balance_right(t->elem, l2, t->right);
    }
    if (c > 0) {
        tree<T> r2 = erase(t->right, x, ord);
        if (r2.get() == t->right.get()) return t;
        return balance_left(t->elem, t->left, r2);
    }
    return glue(t->left, t->right);
}

template <typename T>
tree<T> erase_min(const tree<T>& t) {
    if (!t) return t;
    if (!t->left) return t->right;
    return balance_right(t->elem, erase_min(t->left), t->right);
}

template <typename T>
tree<T> erase_max(const tree<T>& t) {
    if (!t) return t;
    if (!t->right) return t->left;
    return balance_left(t->elem, t->left, erase_max(t->right));
}

template <typename T>
std::optional<std::pair<T, tree<T>>> min_view(const tree<T>& t) {
    if (!t) return std::nullopt;
    return detail::min_view_sure(t->elem, t->left, t->right);
}

template <typename T>
std::optional<std::pair<T, tree<T>>> max_view(const tree<T>& t) {
    if (!t) return std::nullopt;
    return detail::max_view_sure(t->elem, t->left, t->right);
}

// Pre: x is below every element of t.
template <typename T>
tree<T> insert_min(const T& x, const tree<T>& t) {
    if (!t) return single(x);
    return balance_left(t->elem, insert_min(x, t->left), t->right);
}

// Pre: x is above every element of t.
template <typename T>
tree<T> insert_max(const T& x, const tree<T>& t) {
    if (!t) return single(x);
    return balance_right(t->elem, t->left, insert_max(x, t->right));
}

// Joins l, x, r where all of l < x < all of r; l and r may be arbitrarily
// unbalanced relative to each other.
template <typename T>
tree<T> link(const T& x, const tree<T>& l, const tree<T>& r) {
    if (!l) return insert_min(x, r);
    if (!r) return insert_max(x, l);
    if (delta * l->size < r->size) return balance_left(r->elem, link(x, l, r->left), r->right);
    if (delta * r->size < l->size) return balance_right(l->elem, l->left, link(x, l->right, r));
    return bin(x, l, r);
}

// Joins l and r where all of l < all of r; no balance relation required.
template <typename T>
tree<T> merge_trees(const tree<T>& l, const tree<T>& r) {
    if (!l) return r;
    if (!r) return l;
    if (delta * l->size < r->size) return balance_left(r->elem, merge_trees(l, r->left), r->right);
    if (delta * r->size < l->size) return balance_right(l->elem, l->left, merge_trees(l->right, r));
    return glue(l, r);
}

template <typename T, typename Order = default_order>
std::pair<tree<T>, tree<T>> split(const tree<T>& t, const T& x, Order ord = {}) {
    if (!t) return {tree<T>{}, tree<T>{}};
    const auto c = ord(x, t->elem);
    if (c < 0) {
        auto [lt, gt] = split(t->left, x, ord);
        return {std::move(lt), link(t->elem, gt, t->right)};
    }
    if (c > 0) {
        auto [lt, gt] = split(t->right, x, ord);
        return {link(t->elem, t->left, lt), std::move(gt)};
    }
    return {t->left, t->right};
}

template <typename T>
struct split_result {
    tree<T> below;
    bool found = false;
    tree<T> above;
};

template <typename T, typename Order = default_order>
split_result<T> split_member(const tree<T>& t, const T& x, Order ord = {}) {
    if (!t) return {};
    const auto c = ord(x, t->elem);
    if (c < 0) {
        auto sub = split_member(t->left, x, ord);
        return {std::move(sub.below), sub.found, link(t->elem, sub.above, t->right)};
    }
    if (c > 0) {
        auto sub = split_member(t->right, x, ord);
        return {link(t->elem, t->left, sub.below), sub.found, std::move(sub.above)};
    }
    return {t->left, true, t->right};
}

// Divide-and-conquer union with a fast path for singleton arguments.
template <typename T, typename Order = default_order>
tree<T> set_union(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    if (!t2) return t1;
    if (!t1) return t2;
    if (!faults::wb_union_disable_singleton_fastpath.load(std::memory_order_relaxed)) {
        if (t2->size == 1) return insert_r(t1, t2->elem, ord);
        if (t1->size == 1) return insert(t2, t1->elem, ord);
    }
    auto [l2, r2] = split(t2, t1->elem, ord);
    tree<T> l12 = set_union(t1->left, l2, ord);
    tree<T> r12 = set_union(t1->right, r2, ord);
    if (l12.get() == t1->left.get() && r12.get() == t1->right.get()) return t1;
    return link(t1->elem, l12, r12);
}

template <typename T, typename Order = default_order>
tree<T> set_intersection(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    if (!t1 || !t2) return tree<T>{};
    auto sub = split_member(t2, t1->elem, ord);
    tree<T> l12 = set_intersection(t1->left, sub.below, ord);
    tree<T> r12 = set_intersection(t1->right, sub.above, ord);
    if (sub.found) {
        if (l12.get() == t1->left.get() && r12.get() == t1->right.get()) return t1;
        return link(t1->elem, l12, r12);
    }
    return merge_trees(l12, r12);
}

template <typename T, typename Order = default_order>
tree<T> set_difference(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    if (!t1) return tree<T>{};
    if (!t2) return t1;
    auto [l1, r1] = split(t1, t2->elem, ord);
    tree<T> l12 = set_difference(l1, t2->left, ord);
    tree<T> r12 = set_difference(r1, t2->right, ord);
    if (size(l12) + size(r12) == t1->size) return t1;
    return merge_trees(l12, r12);
}

template <typename T, typename Order = default_order>
bool disjoint(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    if (!t1 || !t2) return true;
    auto sub = split_member(t2, t1->elem, ord);
    return !sub.found && disjoint(t1->left, sub.below, ord) && disjoint(t1->right, sub.above, ord);
}

// In-order traversal, ascending.
template <typename T, typename F>
void for_each_asc(const tree<T>& t, F&& f) {
    std::vector<const node<T>*> stack;
    const node<T>* cur = t.get();
    while (cur || !stack.empty()) {
        while (cur) {
            stack.push_back(cur);
            cur = cur->left.get();
        }
        cur = stack.back();
        stack.pop_back();
        f(cur->elem);
        cur = cur->right.get();
    }
}

template <typename T, typename F>
void for_each_desc(const tree<T>& t, F&& f) {
    std::vector<const node<T>*> stack;
    const node<T>* cur = t.get();
    while (cur || !stack.empty()) {
        while (cur) {
            stack.push_back(cur);
            cur = cur->right.get();
        }
        cur = stack.back();
        stack.pop_back();
        f(cur->elem);
        cur = cur->left.get();
    }
}

template <typename T>
std::vector<T> to_asc_list(const tree<T>& t) {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(size(t)));
    for_each_asc(t, [&](const T& x) { out.push_back(x); });
    return out;
}

template <typename T>
std::vector<T> to_desc_list(const tree<T>& t) {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(size(t)));
    for_each_desc(t, [&](const T& x) { out.push_back(x); });
    return out;
}

template <typename T>
std::vector<T> to_list(const tree<T>& t) {
    return to_asc_list(t);
}

template <typename T>
std::vector<T> elems(const tree<T>& t) {
    return to_asc_list(t);
}

// fold_left f z == list fold over the ascending elements;
// fold_right f z == the right fold over the same list.
template <typename T, typename A, typename F>
A fold_left(const tree<T>& t, A z, F&& f) {
    for_each_asc(t, [&](const T& x) { z = f(std::move(z), x); });
    return z;
}

template <typename T, typename A, typename F>
A fold_right(const tree<T>& t, A z, F&& f) {
    for_each_desc(t, [&](const T& x) { z = f(x, std::move(z)); });
    return z;
}

template <typename T, typename Order = default_order>
tree<T> from_list(std::span<const T> xs, Order ord = {}) {
    tree<T> t;
    for (const T& x : xs) t = insert(t, x, ord);
    return t;
}

template <typename T, typename Order = default_order>
tree<T> from_list(const std::vector<T>& xs, Order ord = {}) {
    return from_list(std::span<const T>(xs), ord);
}

namespace detail {

// Builds a perfectly weight-bounded tree from a strictly ascending
// sequence: create consumes up to s elements halving s until 1, go links
// the pieces while doubling s.  s is always a positive power of two.
template <typename T>
class asc_builder {
  public:
    explicit asc_builder(std::span<const T> xs) : xs_(xs) {}

    tree<T> build() {
        if (xs_.empty()) return {};
        tree<T> t = single(xs_[pos_++]);
        for (std::uint64_t s = 1; pos_ < xs_.size(); s <<= 1) {
            const T& x = xs_[pos_++];
            tree<T> r = create(s);
            t = link(x, t, r);
        }
        return t;
    }

  private:
    tree<T> create(std::uint64_t s) {
        if (pos_ >= xs_.size()) return {};
        if (s == 1) return single(xs_[pos_++]);
        tree<T> l = create(s >> 1);
        if (pos_ >= xs_.size()) return l;
        const T& y = xs_[pos_++];
        tree<T> r = create(s >> 1);
        return link(y, l, r);
    }

    std::span<const T> xs_;
    std::size_t pos_ = 0;
};

template <typename T>
class desc_builder {
  public:
    explicit desc_builder(std::span<const T> xs) : xs_(xs) {}

    tree<T> build() {
        if (xs_.empty()) return {};
        tree<T> t = single(xs_[pos_++]);
        for (std::uint64_t s = 1; pos_ < xs_.size(); s <<= 1) {
            const T& x = xs_[pos_++];
            tree<T> l = create(s);
            t = link(x, l, t);
        }
        return t;
    }

  private:
    tree<T> create(std::uint64_t s) {
        if (pos_ >= xs_.size()) return {};
        if (s == 1) return single(xs_[pos_++]);
        tree<T> r = create(s >> 1);
        if (pos_ >= xs_.size()) return r;
        const T& y = xs_[pos_++];
        tree<T> l = create(s >> 1);
        return link(y, l, r);
    }

    std::span<const T> xs_;
    std::size_t pos_ = 0;
};

// Collapses runs of equal adjacent elements, keeping the last.
template <typename T, typename Order>
std::vector<T> combine_eq(std::span<const T> xs, Order ord) {
    std::vector<T> out;
    out.reserve(xs.size());
    for (const T& x : xs) {
        if (!out.empty() && ord(out.back(), x) == 0)
            out.back() = x;
        else
            out.push_back(x);
    }
    return out;
}

}  // namespace detail

// Pre: xs strictly ascending.  Unsorted input is not detected and yields
// a tree with unspecified contents.
template <typename T>
tree<T> from_distinct_asc_list(std::span<const T> xs) {
    return detail::asc_builder<T>(xs).build();
}

// Pre: xs strictly descending.
template <typename T>
tree<T> from_distinct_desc_list(std::span<const T> xs) {
    return detail::desc_builder<T>(xs).build();
}

// Pre: xs non-decreasing; adjacent duplicates are collapsed.
template <typename T, typename Order = default_order>
tree<T> from_asc_list(std::span<const T> xs, Order ord = {}) {
    const auto distinct = detail::combine_eq(xs, ord);
    return from_distinct_asc_list(std::span<const T>(distinct));
}

// Pre: xs non-increasing.
template <typename T, typename Order = default_order>
tree<T> from_desc_list(std::span<const T> xs, Order ord = {}) {
    const auto distinct = detail::combine_eq(xs, ord);
    return from_distinct_desc_list(std::span<const T>(distinct));
}

template <typename T, typename Pred>
tree<T> filter(const tree<T>& t, Pred&& p) {
    if (!t) return t;
    tree<T> l2 = filter(t->left, p);
    tree<T> r2 = filter(t->right, p);
    if (p(t->elem)) {
        if (l2.get() == t->left.get() && r2.get() == t->right.get()) return t;
        return link(t->elem, l2, r2);
    }
    return merge_trees(l2, r2);
}

template <typename T, typename Pred>
std::pair<tree<T>, tree<T>> partition(const tree<T>& t, Pred&& p) {
    if (!t) return {tree<T>{}, tree<T>{}};
    auto [l1, l2] = partition(t->left, p);
    auto [r1, r2] = partition(t->right, p);
    if (p(t->elem)) {
        tree<T> yes = (l1.get() == t->left.get() && r1.get() == t->right.get())
                          ? t
                          : link(t->elem, l1, r1);
        return {std::move(yes), merge_trees(l2, r2)};
    }
    tree<T> no = (l2.get() == t->left.get() && r2.get() == t->right.get())
                     ? t
                     : link(t->elem, l2, r2);
    return {merge_trees(l1, r1), std::move(no)};
}

// Pre: f is strictly monotone (unchecked); the shape and sizes carry over.
template <typename T, typename F>
auto map_monotonic(const tree<T>& t, F&& f)
    -> tree<std::decay_t<std::invoke_result_t<F&, const T&>>> {
    using U = std::decay_t<std::invoke_result_t<F&, const T&>>;
    if (!t) return {};
    return make_node<U>(t->size, f(t->elem), map_monotonic(t->left, f),
                        map_monotonic(t->right, f));
}

// The first n elements in ascending order, as a valid tree.
template <typename T>
tree<T> take(const tree<T>& t, std::int64_t n) {
    if (n >= size(t)) return t;
    if (n <= 0) return {};
    const std::int64_t size_l = size(t->left);
    if (n < size_l) return take(t->left, n);
    if (n > size_l) return link(t->elem, t->left, take(t->right, n - size_l - 1));
    return t->left;
}

template <typename T>
tree<T> drop(const tree<T>& t, std::int64_t n) {
    if (n >= size(t)) return {};
    if (n <= 0) return t;
    const std::int64_t size_l = size(t->left);
    if (n < size_l) return link(t->elem, drop(t->left, n), t->right);
    if (n > size_l) return drop(t->right, n - size_l - 1);
    return insert_min(t->elem, t->right);
}

template <typename T>
std::pair<tree<T>, tree<T>> split_at(const tree<T>& t, std::int64_t n) {
    if (n >= size(t)) return {t, tree<T>{}};
    if (n <= 0) return {tree<T>{}, t};
    const std::int64_t size_l = size(t->left);
    if (n < size_l) {
        auto [ll, lr] = split_at(t->left, n);
        return {std::move(ll), link(t->elem, lr, t->right)};
    }
    if (n > size_l) {
        auto [rl, rr] = split_at(t->right, n - size_l - 1);
        return {link(t->elem, t->left, rl), std::move(rr)};
    }
    return {t->left, insert_min(t->elem, t->right)};
}

namespace detail {

template <typename T, typename Order>
bool subset_of(const tree<T>& t1, const tree<T>& t2, Order ord) {
    if (!t1) return true;
    if (!t2) return false;
    auto sub = split_member(t2, t1->elem, ord);
    return sub.found && subset_of(t1->left, sub.below, ord) &&
           subset_of(t1->right, sub.above, ord);
}

}  // namespace detail

template <typename T, typename Order = default_order>
bool is_subset_of(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    return size(t1) <= size(t2) && detail::subset_of(t1, t2, ord);
}

namespace detail {

// In-order cursor over the ascending element sequence.
template <typename T>
class cursor {
  public:
    explicit cursor(const tree<T>& t) { push_left(t.get()); }

    bool done() const { return stack_.empty(); }
    const T& value() const { return stack_.back()->elem; }

    void next() {
        const node<T>* n = stack_.back();
        stack_.pop_back();
        push_left(n->right.get());
    }

  private:
    void push_left(const node<T>* n) {
        while (n) {
            stack_.push_back(n);
            n = n->left.get();
        }
    }

    std::vector<const node<T>*> stack_;
};

}  // namespace detail

// Extensional equality: equal element sequences, regardless of shape.
template <typename T, typename Order = default_order>
bool equals(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    if (t1.get() == t2.get()) return true;
    if (size(t1) != size(t2)) return false;
    detail::cursor<T> a(t1), b(t2);
    while (!a.done()) {
        if (ord(a.value(), b.value()) != 0) return false;
        a.next();
        b.next();
    }
    return true;
}

// Lexicographic order on the ascending element sequences.
template <typename T, typename Order = default_order>
std::strong_ordering compare_sets(const tree<T>& t1, const tree<T>& t2, Order ord = {}) {
    detail::cursor<T> a(t1), b(t2);
    while (!a.done() && !b.done()) {
        const auto c = ord(a.value(), b.value());
        if (c != 0) return c;
        a.next();
        b.next();
    }
    if (a.done() && b.done()) return std::strong_ordering::equal;
    return a.done() ? std::strong_ordering::less : std::strong_ordering::greater;
}

template <typename T, typename Order = default_order>
tree<T> unions(std::span<const tree<T>> ts, Order ord = {}) {
    tree<T> acc;
    for (const tree<T>& t : ts) acc = set_union(acc, t, ord);
    return acc;
}

template <typename T, typename Order = default_order>
tree<T> unions(const std::vector<tree<T>>& ts, Order ord = {}) {
    return unions(std::span<const tree<T>>(ts), ord);
}

}  // namespace setforge::wb
