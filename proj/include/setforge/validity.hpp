#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "setforge/bitops.hpp"
#include "setforge/patricia.hpp"
#include "setforge/wbtree.hpp"

// Executable well-formedness checkers.  They accept arbitrary trees,
// including corrupt ones, and collect every violated rule with the path
// from the root ('l'/'r' steps; "<root>" for the root itself).

namespace setforge::validity {

namespace rules {
inline constexpr std::string_view wb_order = "wb.order";
inline constexpr std::string_view wb_size = "wb.size";
inline constexpr std::string_view wb_balance = "wb.balance";
inline constexpr std::string_view pt_nil_child = "pt.nil-child";
inline constexpr std::string_view pt_mask_pow2 = "pt.mask-pow2";
inline constexpr std::string_view pt_prefix_clean = "pt.prefix-clean";
inline constexpr std::string_view pt_range_half = "pt.range-half";
inline constexpr std::string_view pt_tip_align = "pt.tip-align";
inline constexpr std::string_view pt_tip_empty = "pt.tip-empty";
}  // namespace rules

struct failure {
    std::string rule;
    std::string path;  // child-direction steps from the root, "" for the root
    std::string detail;
};

struct report {
    std::vector<failure> failures;

    bool ok() const { return failures.empty(); }
};

inline std::string format_path(std::string_view path) {
    return path.empty() ? std::string("<root>") : std::string(path);
}

inline std::string format_failure(const failure& f) {
    return f.rule + " at " + format_path(f.path) + ": " + f.detail;
}

// The key interval [p * 2^b, (p+1) * 2^b - 1]; never empty.  Two such
// intervals are either disjoint or nested.
struct dyadic_range {
    bits::word p = 0;
    int b = 0;  // 0 <= b <= 64

    friend bool operator==(const dyadic_range&, const dyadic_range&) = default;
};

namespace detail {

inline bits::word shr(bits::word x, int k) {
    return k >= 64 ? 0 : x >> k;
}

}  // namespace detail

inline bits::word range_lo(const dyadic_range& r) {
    return r.b >= 64 ? 0 : r.p << r.b;
}

inline bits::word range_hi(const dyadic_range& r) {
    if (r.b >= 64) return ~bits::word{0};
    return (r.p << r.b) | ((bits::word{1} << r.b) - 1);
}

inline bool range_contains_key(const dyadic_range& r, bits::word k) {
    return detail::shr(k, r.b) == r.p;
}

inline bool range_contains(const dyadic_range& outer, const dyadic_range& inner) {
    return inner.b <= outer.b && detail::shr(inner.p, outer.b - inner.b) == outer.p;
}

// The two halves of a range of height > 0.
inline dyadic_range lower_half(const dyadic_range& r) {
    return {r.p * 2, r.b - 1};
}

inline dyadic_range upper_half(const dyadic_range& r) {
    return {r.p * 2 + 1, r.b - 1};
}

namespace detail {

// Range a node claims via its own prefix and mask; meaningless masks
// (not a power of two) yield nothing.
inline std::optional<dyadic_range> node_range(const pt::node* n) {
    if (!n->is_bin) return dyadic_range{shr(n->prefix, 6), 6};
    if (!std::has_single_bit(n->mask)) return std::nullopt;
    const int j = std::countr_zero(n->mask);
    return dyadic_range{shr(n->prefix, j + 1), j + 1};
}

template <typename T>
std::string describe(const T& x) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::to_string(x);
    } else {
        return "<elem>";
    }
}

inline std::string hex(bits::word x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(x));
    return buf;
}

// Stored sizes come from untrusted dumps; evaluate the balance predicate
// without overflowing (s1 <= delta*s2 rewritten as s2 >= ceil(s1/delta)).
inline bool balanced_wide(std::int64_t s1, std::int64_t s2) {
    if (s1 < 0 || s2 < 0) return false;
    const auto u1 = static_cast<std::uint64_t>(s1);
    const auto u2 = static_cast<std::uint64_t>(s2);
    const auto d = static_cast<std::uint64_t>(wb::delta);
    return u1 + u2 <= 1 || (u2 >= (u1 + d - 1) / d && u1 >= (u2 + d - 1) / d);
}

template <typename T, typename Order>
std::int64_t check_wb_node(const wb::node<T>* n, const T* lb, const T* ub, std::string& path,
                           report& rep, Order& ord) {
    if (!n) return 0;
    if (lb && !(ord(*lb, n->elem) < 0))
        rep.failures.push_back({std::string(rules::wb_order), path,
                                "element " + describe(n->elem) + " not above lower bound " +
                                    describe(*lb)});
    if (ub && !(ord(n->elem, *ub) < 0))
        rep.failures.push_back({std::string(rules::wb_order), path,
                                "element " + describe(n->elem) + " not below upper bound " +
                                    describe(*ub)});
    path.push_back('l');
    const std::int64_t nl = check_wb_node(n->left.get(), lb, &n->elem, path, rep, ord);
    path.back() = 'r';
    const std::int64_t nr = check_wb_node(n->right.get(), &n->elem, ub, path, rep, ord);
    path.pop_back();
    const std::int64_t computed = 1 + nl + nr;
    if (n->size != computed)
        rep.failures.push_back({std::string(rules::wb_size), path,
                                "stored " + std::to_string(n->size) + ", computed " +
                                    std::to_string(computed)});
    if (!balanced_wide(wb::size(n->left), wb::size(n->right)))
        rep.failures.push_back({std::string(rules::wb_balance), path,
                                "sibling sizes (" + std::to_string(wb::size(n->left)) + ", " +
                                    std::to_string(wb::size(n->right)) + ") violate the delta=" +
                                    std::to_string(wb::delta) + " bound"});
    return computed;
}

inline void check_pt_node(const pt::node* n, std::string& path, report& rep) {
    if (!n->is_bin) {
        if ((n->prefix & bits::suffix_bit_mask) != 0)
            rep.failures.push_back({std::string(rules::pt_tip_align), path,
                                    "tip prefix " + hex(n->prefix) + " has low bits set"});
        if (n->bitmap == 0)
            rep.failures.push_back(
                {std::string(rules::pt_tip_empty), path, "tip bitmap is zero"});
        return;
    }
    const bool mask_ok = std::has_single_bit(n->mask);
    if (!mask_ok)
        rep.failures.push_back({std::string(rules::pt_mask_pow2), path,
                                "mask " + hex(n->mask) + " is not a power of two"});
    if (mask_ok && (n->prefix & (n->mask | (n->mask - 1))) != 0)
        rep.failures.push_back({std::string(rules::pt_prefix_clean), path,
                                "prefix " + hex(n->prefix) +
                                    " has bits at or below the mask bit " + hex(n->mask)});
    const std::optional<dyadic_range> own = node_range(n);
    const pt::node* children[2] = {n->left.get(), n->right.get()};
    const char steps[2] = {'l', 'r'};
    for (int i = 0; i < 2; ++i) {
        path.push_back(steps[i]);
        const pt::node* child = children[i];
        if (!child) {
            path.pop_back();
            rep.failures.push_back({std::string(rules::pt_nil_child), path,
                                    std::string("empty ") + (i == 0 ? "left" : "right") +
                                        " child under an interior node"});
            continue;
        }
        if (own) {
            const dyadic_range half = i == 0 ? lower_half(*own) : upper_half(*own);
            if (const auto cr = node_range(child); cr && !range_contains(half, *cr)) {
                rep.failures.push_back(
                    {std::string(rules::pt_range_half), path,
                     "child range [" + hex(range_lo(*cr)) + ", " + hex(range_hi(*cr)) +
                         "] escapes the " + (i == 0 ? "lower" : "upper") + " half [" +
                         hex(range_lo(half)) + ", " + hex(range_hi(half)) + "]"});
            }
        }
        check_pt_node(child, path, rep);
        path.pop_back();
    }
}

}  // namespace detail

// Ordering via threaded bounds, size-correctness, and the balance
// predicate at every interior node.  Collects all violations.
template <typename T, typename Order = wb::default_order>
report check_wbset(const wb::tree<T>& t, Order ord = {}) {
    report rep;
    std::string path;
    detail::check_wb_node(t.get(), static_cast<const T*>(nullptr), static_cast<const T*>(nullptr),
                          path, rep, ord);
    return rep;
}

// Empty children only at the root, masks are powers of two, interior
// prefixes are clean above their mask, every child's range sits inside
// the proper half of its parent's range at every depth, tips are aligned
// and nonempty.
inline report check_patricia(const pt::tree& t) {
    report rep;
    if (!t) return rep;
    std::string path;
    detail::check_pt_node(t.get(), path, rep);
    return rep;
}

// The smallest dyadic interval containing every key of s; nothing for the
// empty tree.  Pre: s passes check_patricia (verified; throws otherwise).
inline std::optional<dyadic_range> desc_range(const pt::tree& t) {
    if (!t) return std::nullopt;
    if (!check_patricia(t).ok())
        throw std::invalid_argument("desc_range: tree fails well-formedness");
    return detail::node_range(t.get());
}

}  // namespace setforge::validity
