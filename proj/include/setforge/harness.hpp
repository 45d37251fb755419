#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "setforge/bitops.hpp"
#include "setforge/oracle.hpp"
#include "setforge/patricia.hpp"
#include "setforge/script.hpp"
#include "setforge/validity.hpp"
#include "setforge/wbtree.hpp"

// Differential test driver: runs a tree and the sorted-list reference
// model in lockstep over generated op scripts, checks registered laws,
// and shrinks failing scripts by op deletion and key halving until they
// are 1-minimal.

namespace setforge::harness {

// Per-structure glue for the lockstep runner.
struct wb_adapter {
    using key = std::int64_t;
    using tree_type = wb::tree<std::int64_t>;

    static constexpr std::string_view name = "wb";

    static key to_key(std::uint64_t k) { return static_cast<key>(k); }
    static std::uint64_t from_key(key k) { return static_cast<std::uint64_t>(k); }

    static tree_type from_keys(const std::vector<std::uint64_t>& ks) {
        tree_type t;
        for (std::uint64_t k : ks) t = wb::insert(t, to_key(k));
        return t;
    }

    static tree_type insert(const tree_type& t, key x) { return wb::insert(t, x); }
    static tree_type erase(const tree_type& t, key x) { return wb::erase(t, x); }
    static tree_type unite(const tree_type& a, const tree_type& b) { return wb::set_union(a, b); }
    static tree_type intersect(const tree_type& a, const tree_type& b) {
        return wb::set_intersection(a, b);
    }
    static tree_type difference(const tree_type& a, const tree_type& b) {
        return wb::set_difference(a, b);
    }
    static tree_type filter_parity(const tree_type& t, bool keep_odd) {
        return wb::filter(t, [keep_odd](key x) { return ((x & 1) != 0) == keep_odd; });
    }
    static std::pair<tree_type, tree_type> split2(const tree_type& t, key x) {
        return wb::split(t, x);
    }
    // Rejoins split halves around x; yields the original set plus x.
    static tree_type relink(key x, const tree_type& lo, const tree_type& hi) {
        return wb::link(x, lo, hi);
    }
    static bool member(const tree_type& t, key x) { return wb::member(t, x); }
    static std::int64_t size(const tree_type& t) { return wb::size(t); }
    static bool equal(const tree_type& a, const tree_type& b) { return wb::equals(a, b); }
    static std::strong_ordering compare(const tree_type& a, const tree_type& b) {
        return wb::compare_sets(a, b);
    }
    static bool same_root(const tree_type& a, const tree_type& b) { return a.get() == b.get(); }
    static std::vector<key> to_asc(const tree_type& t) { return wb::to_asc_list(t); }

    template <typename A, typename F>
    static A fold_l(const tree_type& t, A z, F&& f) {
        return wb::fold_left(t, std::move(z), f);
    }
    template <typename A, typename F>
    static A fold_r(const tree_type& t, A z, F&& f) {
        return wb::fold_right(t, std::move(z), f);
    }

    static std::optional<std::string> check(const tree_type& t) {
        const auto rep = validity::check_wbset(t);
        if (rep.ok()) return std::nullopt;
        std::string out;
        for (const auto& f : rep.failures) {
            out += validity::format_failure(f);
            out += '\n';
        }
        return out;
    }
};

struct pt_adapter {
    using key = std::uint64_t;
    using tree_type = pt::tree;

    static constexpr std::string_view name = "pt";

    static key to_key(std::uint64_t k) { return k; }
    static std::uint64_t from_key(key k) { return k; }

    static tree_type from_keys(const std::vector<std::uint64_t>& ks) { return pt::from_list(ks); }

    static tree_type insert(const tree_type& t, key x) { return pt::insert(t, x); }
    static tree_type erase(const tree_type& t, key x) { return pt::erase(t, x); }
    static tree_type unite(const tree_type& a, const tree_type& b) { return pt::set_union(a, b); }
    static tree_type intersect(const tree_type& a, const tree_type& b) {
        return pt::set_intersection(a, b);
    }
    static tree_type difference(const tree_type& a, const tree_type& b) {
        return pt::set_difference(a, b);
    }
    static tree_type filter_parity(const tree_type& t, bool keep_odd) {
        return pt::filter(t, [keep_odd](key x) { return ((x & 1) != 0) == keep_odd; });
    }
    static std::pair<tree_type, tree_type> split2(const tree_type& t, key x) {
        return pt::split(t, x);
    }
    static tree_type relink(key x, const tree_type& lo, const tree_type& hi) {
        return pt::insert(pt::set_union(lo, hi), x);
    }
    static bool member(const tree_type& t, key x) { return pt::member(t, x); }
    static std::int64_t size(const tree_type& t) { return pt::size(t); }
    static bool equal(const tree_type& a, const tree_type& b) { return pt::equals(a, b); }
    static std::strong_ordering compare(const tree_type& a, const tree_type& b) {
        return pt::compare_sets(a, b);
    }
    static bool same_root(const tree_type& a, const tree_type& b) { return a.get() == b.get(); }
    static std::vector<key> to_asc(const tree_type& t) { return pt::to_asc_list(t); }

    template <typename A, typename F>
    static A fold_l(const tree_type& t, A z, F&& f) {
        return pt::fold_left(t, std::move(z), f);
    }
    template <typename A, typename F>
    static A fold_r(const tree_type& t, A z, F&& f) {
        return pt::fold_right(t, std::move(z), f);
    }

    static std::optional<std::string> check(const tree_type& t) {
        const auto rep = validity::check_patricia(t);
        if (rep.ok()) return std::nullopt;
        std::string out;
        for (const auto& f : rep.failures) {
            out += validity::format_failure(f);
            out += '\n';
        }
        return out;
    }
};

// Law selection for the lockstep runner.
namespace law {
inline constexpr unsigned validity = 1u << 0;
inline constexpr unsigned oracle_equiv = 1u << 1;
inline constexpr unsigned insert_sem = 1u << 2;
inline constexpr unsigned insert_size = 1u << 3;
inline constexpr unsigned sharing = 1u << 4;
inline constexpr unsigned mem = 1u << 5;
inline constexpr unsigned fold = 1u << 6;
inline constexpr unsigned all = 0x7f;
}  // namespace law

namespace detail {

template <typename K>
std::vector<K> keys_to_elems(const std::vector<std::uint64_t>& ks) {
    std::vector<K> out;
    out.reserve(ks.size());
    for (std::uint64_t k : ks) out.push_back(static_cast<K>(k));
    return out;
}

template <typename K>
std::string show_keys(const std::vector<K>& ks, std::size_t limit = 16) {
    std::string out = "[";
    for (std::size_t i = 0; i < ks.size() && i < limit; ++i) {
        if (i) out += ' ';
        out += std::to_string(ks[i]);
    }
    if (ks.size() > limit) out += " ...";
    out += ']';
    return out;
}

}  // namespace detail

// Runs the script against tree and model together, checking the selected
// laws after every step.  Returns a diagnostic on the first broken law.
template <typename A>
std::optional<std::string> run_lockstep(const script::op_script& sc, unsigned laws) {
    using K = typename A::key;
    typename A::tree_type t;
    oracle::model<K> m;

    const auto fail = [&](std::size_t idx, const script::op& o, std::string what) {
        return std::string(A::name) + " op " + std::to_string(idx + 1) + " (" +
               std::string(script::opcode_name(o.code)) + "): " + std::move(what);
    };

    for (std::size_t idx = 0; idx < sc.ops.size(); ++idx) {
        const script::op& o = sc.ops[idx];
        script::rng probe(script::mix_seed(sc.seed, idx + 0x5157));
        switch (o.code) {
            case script::opcode::from_list: {
                t = A::from_keys(o.keys);
                m = oracle::from_values(detail::keys_to_elems<K>(o.keys));
                break;
            }
            case script::opcode::insert: {
                if (o.keys.empty()) break;
                const K x = A::to_key(o.keys[0]);
                const bool present = oracle::member(m, x);
                const std::int64_t before = A::size(t);
                auto t2 = A::insert(t, x);
                if ((laws & law::insert_size) != 0) {
                    const std::int64_t expected = before + (present ? 0 : 1);
                    if (A::size(t2) != expected)
                        return fail(idx, o,
                                    "size " + std::to_string(A::size(t2)) + " after insert, expected " +
                                        std::to_string(expected));
                }
                if ((laws & law::insert_sem) != 0) {
                    for (int pi = 0; pi < 6; ++pi) {
                        const K probe_key =
                            pi == 0 ? x : A::to_key(probe.below(std::uint64_t{1} << 16));
                        const bool expect = (probe_key == x) || A::member(t, probe_key);
                        if (A::member(t2, probe_key) != expect)
                            return fail(idx, o,
                                        "membership of " + std::to_string(probe_key) +
                                            " disagrees with the pointwise insert law");
                    }
                }
                if ((laws & law::sharing) != 0 && present && !A::same_root(t2, t))
                    return fail(idx, o, "insert of a present key did not return the input tree");
                t = t2;
                m = oracle::insert(m, x);
                break;
            }
            case script::opcode::erase: {
                if (o.keys.empty()) break;
                const K x = A::to_key(o.keys[0]);
                const bool present = oracle::member(m, x);
                auto t2 = A::erase(t, x);
                if ((laws & law::sharing) != 0 && !present && !A::same_root(t2, t))
                    return fail(idx, o, "erase of an absent key did not return the input tree");
                t = t2;
                m = oracle::erase(m, x);
                break;
            }
            case script::opcode::union_with: {
                const auto other = A::from_keys(o.keys);
                t = A::unite(t, other);
                m = oracle::set_union(m, oracle::from_values(detail::keys_to_elems<K>(o.keys)));
                break;
            }
            case script::opcode::intersect_with: {
                const auto other = A::from_keys(o.keys);
                t = A::intersect(t, other);
                m = oracle::set_intersection(m,
                                             oracle::from_values(detail::keys_to_elems<K>(o.keys)));
                break;
            }
            case script::opcode::difference_with: {
                const auto other = A::from_keys(o.keys);
                t = A::difference(t, other);
                m = oracle::set_difference(m,
                                           oracle::from_values(detail::keys_to_elems<K>(o.keys)));
                break;
            }
            case script::opcode::filter_parity: {
                t = A::filter_parity(t, o.keep_odd);
                m = oracle::filter(m, [&](K x) {
                    return ((static_cast<std::uint64_t>(x) & 1) != 0) == o.keep_odd;
                });
                break;
            }
            case script::opcode::split_at_key: {
                if (o.keys.empty()) break;
                const K x = A::to_key(o.keys[0]);
                auto [lo, hi] = A::split2(t, x);
                auto [mlo, mfound, mhi] = oracle::split(m, x);
                (void)mfound;
                if ((laws & law::validity) != 0) {
                    if (auto err = A::check(lo)) return fail(idx, o, "low half invalid:\n" + *err);
                    if (auto err = A::check(hi)) return fail(idx, o, "high half invalid:\n" + *err);
                }
                if ((laws & law::oracle_equiv) != 0) {
                    if (A::to_asc(lo) != mlo)
                        return fail(idx, o, "low half disagrees with the reference split");
                    if (A::to_asc(hi) != mhi)
                        return fail(idx, o, "high half disagrees with the reference split");
                }
                t = A::relink(x, lo, hi);
                m = oracle::insert(m, x);
                break;
            }
            case script::opcode::fold_check: {
                if ((laws & law::fold) != 0) {
                    const auto xs = A::to_asc(t);
                    constexpr std::uint64_t mul = 1099511628211ULL;
                    const auto step_l = [&](std::uint64_t acc, K k) {
                        return acc * mul + static_cast<std::uint64_t>(k);
                    };
                    std::uint64_t want_l = 0;
                    for (K k : xs) want_l = step_l(want_l, k);
                    const std::uint64_t got_l = A::fold_l(t, std::uint64_t{0}, step_l);
                    if (got_l != want_l)
                        return fail(idx, o, "fold_left disagrees with the list fold");
                    const auto step_r = [&](K k, std::uint64_t acc) {
                        return acc * mul + static_cast<std::uint64_t>(k);
                    };
                    std::uint64_t want_r = 0;
                    for (auto it = xs.rbegin(); it != xs.rend(); ++it) want_r = step_r(*it, want_r);
                    const std::uint64_t got_r = A::fold_r(t, std::uint64_t{0}, step_r);
                    if (got_r != want_r)
                        return fail(idx, o, "fold_right disagrees with the list fold");
                    // The list view is the right fold of cons over the set.
                    auto consed = A::fold_r(t, std::vector<K>{}, [](K k, std::vector<K> acc) {
                        acc.push_back(k);
                        return acc;
                    });
                    std::reverse(consed.begin(), consed.end());
                    if (consed != xs)
                        return fail(idx, o, "ascending list is not the right fold of cons");
                }
                break;
            }
        }
        if ((laws & law::validity) != 0) {
            if (auto err = A::check(t)) return fail(idx, o, "tree invalid:\n" + *err);
        }
        if ((laws & law::oracle_equiv) != 0) {
            const auto xs = A::to_asc(t);
            if (xs != m)
                return fail(idx, o,
                            "tree " + detail::show_keys(xs) + " != reference " +
                                detail::show_keys(m));
        }
        if ((laws & law::mem) != 0) {
            for (int pi = 0; pi < 4; ++pi) {
                K probe_key;
                if (!m.empty() && pi < 2) {
                    probe_key = m[probe.below(m.size())];
                } else {
                    probe_key = A::to_key(probe.below(std::uint64_t{1} << 16));
                }
                if (A::member(t, probe_key) != oracle::member(m, probe_key))
                    return fail(idx, o,
                                "membership of " + std::to_string(probe_key) +
                                    " disagrees with the reference model");
            }
        }
    }
    return std::nullopt;
}

// Builds the first `arity` sets named by the script's fromlist lines;
// missing lines give empty sets, so shrinking stays well defined.
template <typename A>
std::vector<typename A::tree_type> sets_from_script(const script::op_script& sc, int arity) {
    std::vector<typename A::tree_type> out(static_cast<std::size_t>(arity));
    std::size_t i = 0;
    for (const script::op& o : sc.ops) {
        if (i >= out.size()) break;
        if (o.code == script::opcode::from_list) out[i++] = A::from_keys(o.keys);
    }
    return out;
}

struct property {
    std::string id;
    std::string description;
    int arity;  // 0: lockstep script; >0: fromlist sets; -1: raw 64-bit words
    bool serial = false;
    std::function<std::optional<std::string>(const script::op_script&)> eval;
};

namespace detail {

template <typename A>
void register_structure_properties(std::vector<property>& props) {
    const std::string p(A::name);
    props.push_back({p + ".wf-after-ops", "every intermediate tree passes its validity checker", 0,
                     false,
                     [](const script::op_script& sc) { return run_lockstep<A>(sc, law::validity); }});
    props.push_back({p + ".oracle-equiv",
                     "every intermediate tree equals the sorted-list reference model", 0, false,
                     [](const script::op_script& sc) {
                         return run_lockstep<A>(sc, law::oracle_equiv);
                     }});
    props.push_back({p + ".insert-sem",
                     "membership after insert x is (i == x) || membership before", 0, false,
                     [](const script::op_script& sc) { return run_lockstep<A>(sc, law::insert_sem); }});
    props.push_back({p + ".insert-size", "insert grows the size by one exactly when absent", 0,
                     false,
                     [](const script::op_script& sc) {
                         return run_lockstep<A>(sc, law::insert_size);
                     }});
    props.push_back({p + ".sharing",
                     "inserting a present key or erasing an absent one returns the input node", 0,
                     false,
                     [](const script::op_script& sc) { return run_lockstep<A>(sc, law::sharing); }});
    props.push_back({p + ".mem", "member agrees with the reference model in both directions", 0,
                     false,
                     [](const script::op_script& sc) { return run_lockstep<A>(sc, law::mem); }});
    props.push_back({p + ".fold",
                     "folds agree with list folds; the ascending list is the fold of cons", 0,
                     false,
                     [](const script::op_script& sc) { return run_lockstep<A>(sc, law::fold); }});

    const auto sets3 = [](const script::op_script& sc) { return sets_from_script<A>(sc, 3); };
    props.push_back(
        {p + ".union-assoc", "union is associative", 3, false,
         [sets3](const script::op_script& sc) -> std::optional<std::string> {
             const auto s = sets3(sc);
             if (!A::equal(A::unite(s[0], A::unite(s[1], s[2])),
                           A::unite(A::unite(s[0], s[1]), s[2])))
                 return "union(a, union(b, c)) != union(union(a, b), c)";
             return std::nullopt;
         }});
    props.push_back({p + ".union-comm", "union is commutative", 2, false,
                     [](const script::op_script& sc) -> std::optional<std::string> {
                         const auto s = sets_from_script<A>(sc, 2);
                         if (!A::equal(A::unite(s[0], s[1]), A::unite(s[1], s[0])))
                             return "union(a, b) != union(b, a)";
                         return std::nullopt;
                     }});
    props.push_back({p + ".union-idem", "union is idempotent", 1, false,
                     [](const script::op_script& sc) -> std::optional<std::string> {
                         const auto s = sets_from_script<A>(sc, 1);
                         if (!A::equal(A::unite(s[0], s[0]), s[0])) return "union(a, a) != a";
                         return std::nullopt;
                     }});
    props.push_back({p + ".monoid-identity", "the empty set is a two-sided union identity", 1,
                     false,
                     [](const script::op_script& sc) -> std::optional<std::string> {
                         const auto s = sets_from_script<A>(sc, 1);
                         const typename A::tree_type none;
                         if (!A::equal(A::unite(none, s[0]), s[0]))
                             return "union(empty, a) != a";
                         if (!A::equal(A::unite(s[0], none), s[0]))
                             return "union(a, empty) != a";
                         return std::nullopt;
                     }});
    props.push_back(
        {p + ".demorgan", "difference and intersection interlock", 2, false,
         [](const script::op_script& sc) -> std::optional<std::string> {
             const auto s = sets_from_script<A>(sc, 2);
             if (!A::equal(A::difference(s[0], s[1]),
                           A::difference(s[0], A::intersect(s[0], s[1]))))
                 return "a - b != a - (a & b)";
             if (!A::equal(A::intersect(s[0], s[1]),
                           A::difference(s[0], A::difference(s[0], s[1]))))
                 return "a & b != a - (a - b)";
             return std::nullopt;
         }});
    props.push_back(
        {p + ".ord-laws", "compare_sets is a lawful linear order", 3, false,
         [](const script::op_script& sc) -> std::optional<std::string> {
             const auto s = sets_from_script<A>(sc, 3);
             const auto le = [](const typename A::tree_type& a, const typename A::tree_type& b) {
                 return A::compare(a, b) != std::strong_ordering::greater;
             };
             if (le(s[0], s[1]) && le(s[1], s[0]) && !A::equal(s[0], s[1]))
                 return "antisymmetry violated";
             if (le(s[0], s[1]) && le(s[1], s[2]) && !le(s[0], s[2]))
                 return "transitivity violated";
             if (!le(s[0], s[1]) && !le(s[1], s[0])) return "totality violated";
             if ((A::compare(s[0], s[1]) == std::strong_ordering::equal) != A::equal(s[0], s[1]))
                 return "compare and equality disagree";
             return std::nullopt;
         }});
}

}  // namespace detail

inline const std::vector<property>& catalog() {
    static const std::vector<property> props = [] {
        std::vector<property> out;
        detail::register_structure_properties<wb_adapter>(out);
        detail::register_structure_properties<pt_adapter>(out);

        out.push_back({"wb.balance-audit",
                       "generated workloads satisfy the rebalance entry precondition", 0, true,
                       [](const script::op_script& sc) -> std::optional<std::string> {
                           static std::mutex mu;
                           std::lock_guard<std::mutex> guard(mu);
                           auto& st = wb::audit::stats();
                           const std::uint64_t before =
                               st.violations.load(std::memory_order_relaxed);
                           wb::audit::enabled = true;
                           auto err = run_lockstep<wb_adapter>(sc, law::validity);
                           wb::audit::enabled = false;
                           if (err) return err;
                           const std::uint64_t after =
                               st.violations.load(std::memory_order_relaxed);
                           if (after != before)
                               return "rebalance precondition violated on this workload";
                           return std::nullopt;
                       }});

        out.push_back(
            {"pt.uniqueness",
             "any two insertion orders build the identical tree, matching the reference", 1, false,
             [](const script::op_script& sc) -> std::optional<std::string> {
                 std::vector<std::uint64_t> keys;
                 for (const auto& o : sc.ops)
                     if (o.code == script::opcode::from_list) {
                         keys = o.keys;
                         break;
                     }
                 const pt::tree a = pt::from_list(keys);
                 std::vector<std::uint64_t> shuffled = keys;
                 script::rng r(script::mix_seed(sc.seed, 0x0bf));
                 for (std::size_t i = shuffled.size(); i > 1; --i)
                     std::swap(shuffled[i - 1], shuffled[r.below(i)]);
                 const pt::tree b = pt::from_list(shuffled);
                 if (!pt::equals(a, b)) return "insertion order changed the representation";
                 const auto want = oracle::from_values(keys);
                 if (pt::to_asc_list(a) != want) return "tree disagrees with the reference model";
                 return std::nullopt;
             }});

        const auto word_pairs = [](const script::op_script& sc) {
            std::vector<std::uint64_t> ws;
            for (const auto& o : sc.ops)
                if (o.code == script::opcode::from_list) {
                    ws = o.keys;
                    break;
                }
            return ws;
        };

        out.push_back({"bit.rev-involution", "bit reversal is an involution", -1, false,
                       [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                           for (std::uint64_t w : word_pairs(sc))
                               if (bits::rev_word(bits::rev_word(w)) != w)
                                   return "rev(rev(" + std::to_string(w) + ")) != input";
                           return std::nullopt;
                       }});
        out.push_back({"bit.rev-oracle", "bit reversal agrees with the per-bit copy", -1, false,
                       [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                           for (std::uint64_t w : word_pairs(sc)) {
                               std::uint64_t naive = 0;
                               for (int j = 0; j < 64; ++j)
                                   if (w & (std::uint64_t{1} << j))
                                       naive |= std::uint64_t{1} << (63 - j);
                               if (bits::rev_word(w) != naive)
                                   return "rev_word(" + std::to_string(w) + ") != per-bit copy";
                           }
                           return std::nullopt;
                       }});
        out.push_back(
            {"bit.single-bit-oracle", "lowest/highest bit masks agree with bit scans", -1, false,
             [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                 for (std::uint64_t w : word_pairs(sc)) {
                     if (w == 0) continue;
                     std::uint64_t lo = 0, hi = 0;
                     int lo_idx = -1;
                     for (int j = 0; j < 64; ++j)
                         if (w & (std::uint64_t{1} << j)) {
                             hi = std::uint64_t{1} << j;
                             if (!lo) {
                                 lo = hi;
                                 lo_idx = j;
                             }
                         }
                     if (bits::lowest_bit_mask(w) != lo) return "lowest_bit_mask mismatch";
                     if (bits::highest_bit_mask(w) != hi) return "highest_bit_mask mismatch";
                     if (bits::index_of_only_bit(lo) != lo_idx)
                         return "index_of_only_bit mismatch";
                     if ((lo & w) == 0 || (hi & w) == 0)
                         return "extracted bit not part of the input";
                 }
                 return std::nullopt;
             }});
        out.push_back(
            {"bit.mask-ops-oracle", "mask/zero/nomatch agree with per-bit models", -1, false,
             [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                 const auto ws = word_pairs(sc);
                 for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
                     const std::uint64_t x = ws[i];
                     const std::uint64_t y = ws[i + 1];
                     const std::uint64_t m = std::uint64_t{1} << (y % 64);
                     const int b = std::countr_zero(m);
                     std::uint64_t kept = 0;
                     for (int j = b + 1; j < 64; ++j) kept |= x & (std::uint64_t{1} << j);
                     if (bits::mask(x, m) != kept) return "mask() differs from the per-bit model";
                     if (bits::zero(x, m) != ((x & m) == 0)) return "zero() differs from x AND m";
                     const std::uint64_t p = bits::mask(y, m);
                     if (bits::nomatch(x, p, m) != (bits::mask(x, m) != p))
                         return "nomatch() differs from mask(x, m) != p";
                     if (bits::nomatch(x, bits::mask(x, m), m))
                         return "x mismatches its own prefix";
                 }
                 return std::nullopt;
             }});
        out.push_back(
            {"bit.branch-mask-law", "branch_mask splits two prefixes into distinct halves", -1,
             false, [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                 const auto ws = word_pairs(sc);
                 for (std::size_t i = 0; i + 1 < ws.size(); i += 2) {
                     const std::uint64_t p1 = ws[i], p2 = ws[i + 1];
                     if (p1 == p2) continue;
                     const std::uint64_t m = bits::branch_mask(p1, p2);
                     if (bits::mask(p1, m) != bits::mask(p2, m))
                         return "prefixes disagree above the branch bit";
                     if (bits::zero(p1, m) == bits::zero(p2, m))
                         return "prefixes land on the same side of the branch bit";
                 }
                 return std::nullopt;
             }});
        out.push_back({"bit.prefix-suffix", "prefix_of(x) + suffix_of(x) reassembles x", -1, false,
                       [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                           for (std::uint64_t w : word_pairs(sc)) {
                               if (bits::prefix_of(w) + static_cast<std::uint64_t>(bits::suffix_of(w)) != w)
                                   return "prefix + suffix != x";
                               if ((bits::prefix_of(w) & bits::suffix_bit_mask) != 0)
                                   return "prefix has low bits set";
                               if (bits::bitmap_of(w) !=
                                   std::uint64_t{1} << bits::suffix_of(w))
                                   return "bitmap_of is not the suffix bit";
                           }
                           return std::nullopt;
                       }});
        out.push_back(
            {"bit.andnot-xor", "x AND NOT y equals x XOR (x AND y)", -1, false,
             [word_pairs](const script::op_script& sc) -> std::optional<std::string> {
                 const auto ws = word_pairs(sc);
                 for (std::size_t i = 0; i + 1 < ws.size(); i += 2) {
                     const std::uint64_t x = ws[i], y = ws[i + 1];
                     if ((x & ~y) != (x ^ (x & y))) return "rewrite law violated";
                 }
                 return std::nullopt;
             }});
        return out;
    }();
    return props;
}

inline const property* find_property(std::string_view id) {
    for (const property& p : catalog())
        if (p.id == id) return &p;
    return nullptr;
}

struct property_result {
    std::string id;
    int cases_run = 0;
    bool passed = true;
    std::optional<script::op_script> counterexample;  // minimal failing script
    std::string diagnostics;
};

namespace detail {

inline script::op_script case_script(const property& p, std::uint64_t case_seed) {
    if (p.arity > 0) return script::generate_sets_script(case_seed, p.arity);
    if (p.arity == 0) {
        script::rng r(case_seed);
        const int ops = 8 + static_cast<int>(r.below(48));
        return script::generate_script(case_seed, ops);
    }
    // raw 64-bit words, full range
    script::op_script sc;
    sc.seed = case_seed;
    script::rng r(case_seed);
    script::op o;
    o.code = script::opcode::from_list;
    for (int i = 0; i < 32; ++i) o.keys.push_back(r.next());
    sc.ops.push_back(std::move(o));
    return sc;
}

// Greedy 1-minimal shrink: drop whole ops, drop single keys, halve keys.
inline script::op_script shrink(const property& p, script::op_script sc, std::string* diag) {
    const auto fails = [&](const script::op_script& c) {
        auto err = p.eval(c);
        if (err && diag) *diag = *err;
        return err.has_value();
    };
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < sc.ops.size();) {
            script::op_script c = sc;
            c.ops.erase(c.ops.begin() + static_cast<std::ptrdiff_t>(i));
            if (fails(c)) {
                sc = std::move(c);
                progress = true;
            } else {
                ++i;
            }
        }
        for (std::size_t i = 0; i < sc.ops.size(); ++i) {
            for (std::size_t j = 0; j < sc.ops[i].keys.size();) {
                script::op_script c = sc;
                c.ops[i].keys.erase(c.ops[i].keys.begin() + static_cast<std::ptrdiff_t>(j));
                if (fails(c)) {
                    sc = std::move(c);
                    progress = true;
                } else {
                    ++j;
                }
            }
        }
        for (std::size_t i = 0; i < sc.ops.size(); ++i) {
            for (std::size_t j = 0; j < sc.ops[i].keys.size(); ++j) {
                while (sc.ops[i].keys[j] > 0) {
                    script::op_script c = sc;
                    c.ops[i].keys[j] /= 2;
                    if (!fails(c)) break;
                    sc = std::move(c);
                    progress = true;
                }
            }
        }
    }
    return sc;
}

}  // namespace detail

// Runs `cases` generated inputs of the property; deterministic given the
// seed.  On failure the smallest-index failing case is shrunk.
inline property_result run_property(std::string_view id, int cases, std::uint64_t seed,
                                    int workers = 2) {
    const property* p = find_property(id);
    if (!p) throw std::invalid_argument("unknown property id: " + std::string(id));

    property_result result;
    result.id = p->id;
    result.cases_run = cases;

    std::mutex mu;
    std::size_t first_failure = static_cast<std::size_t>(-1);
    std::string first_diag;

    std::atomic<std::size_t> next{0};
    const int nworkers = p->serial ? 1 : std::max(1, std::min(workers, cases));
    const auto run_cases = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= static_cast<std::size_t>(cases)) return;
            const auto sc = detail::case_script(*p, script::mix_seed(seed, i));
            if (auto err = p->eval(sc)) {
                std::lock_guard<std::mutex> guard(mu);
                if (i < first_failure) {
                    first_failure = i;
                    first_diag = *err;
                }
            }
        }
    };
    if (nworkers <= 1) {
        run_cases();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(run_cases);
        for (auto& th : pool) th.join();
    }

    if (first_failure != static_cast<std::size_t>(-1)) {
        result.passed = false;
        auto sc = detail::case_script(*p, script::mix_seed(seed, first_failure));
        result.diagnostics = first_diag;
        result.counterexample = detail::shrink(*p, std::move(sc), &result.diagnostics);
    }
    return result;
}

// Full lockstep fuzzing with every law enabled; backs the fuzz command.
template <typename A>
property_result run_fuzz(int cases, std::uint64_t seed, int ops_per_case, int workers = 2) {
    property prop;
    prop.id = std::string(A::name) + ".fuzz";
    prop.arity = 0;
    prop.eval = [](const script::op_script& sc) { return run_lockstep<A>(sc, law::all); };

    property_result result;
    result.id = prop.id;
    result.cases_run = cases;

    std::mutex mu;
    std::size_t first_failure = static_cast<std::size_t>(-1);
    std::string first_diag;
    std::atomic<std::size_t> next{0};
    const auto run_cases = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= static_cast<std::size_t>(cases)) return;
            const auto sc = script::generate_script(script::mix_seed(seed, i), ops_per_case);
            if (auto err = prop.eval(sc)) {
                std::lock_guard<std::mutex> guard(mu);
                if (i < first_failure) {
                    first_failure = i;
                    first_diag = *err;
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const int nworkers = std::max(1, std::min(workers, cases));
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(run_cases);
    for (auto& th : pool) th.join();

    if (first_failure != static_cast<std::size_t>(-1)) {
        result.passed = false;
        auto sc = script::generate_script(script::mix_seed(seed, first_failure), ops_per_case);
        result.diagnostics = first_diag;
        result.counterexample = detail::shrink(prop, std::move(sc), &result.diagnostics);
    }
    return result;
}

// All subsets of {0..2^bits - 1 keys}, all pairs, against the reference
// model: union, intersection, difference, subset, equality, and split at
// every key; plus representation uniqueness for the Patricia trees.
inline property_result run_exhaustive(int bits) {
    if (bits < 0 || bits > 8) throw std::invalid_argument("exhaustive universe limited to 8 bits");
    property_result result;
    result.id = "exhaustive";

    const auto models = oracle::enumerate_universe(bits);
    const std::size_t n = models.size();

    std::vector<pt::tree> pts(n);
    std::vector<wb::tree<std::int64_t>> wbs(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = pt::from_list(models[i]);
        std::vector<std::uint64_t> rev(models[i].rbegin(), models[i].rend());
        if (!pt::equals(pts[i], pt::from_list(rev))) {
            result.passed = false;
            result.diagnostics = "patricia representation depends on insertion order for subset " +
                                 std::to_string(i);
            return result;
        }
        wbs[i] = wb::from_list(detail::keys_to_elems<std::int64_t>(models[i]));
    }

    long long cases = 0;
    const auto fail = [&](std::string what) {
        result.passed = false;
        result.diagnostics = std::move(what);
    };

    for (std::size_t i = 0; i < n && result.passed; ++i) {
        for (std::size_t j = 0; j < n && result.passed; ++j) {
            const auto u = oracle::set_union(models[i], models[j]);
            const auto x = oracle::set_intersection(models[i], models[j]);
            const auto d = oracle::set_difference(models[i], models[j]);
            const auto pair_name = "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
            if (pt::to_asc_list(pt::set_union(pts[i], pts[j])) != u)
                fail("pt union mismatch at " + pair_name);
            else if (pt::to_asc_list(pt::set_intersection(pts[i], pts[j])) != x)
                fail("pt intersection mismatch at " + pair_name);
            else if (pt::to_asc_list(pt::set_difference(pts[i], pts[j])) != d)
                fail("pt difference mismatch at " + pair_name);
            else if (pt::is_subset_of(pts[i], pts[j]) != oracle::is_subset(models[i], models[j]))
                fail("pt subset mismatch at " + pair_name);
            else if (pt::equals(pts[i], pts[j]) != (models[i] == models[j]))
                fail("pt equality mismatch at " + pair_name);
            else if (pt::disjoint(pts[i], pts[j]) != x.empty())
                fail("pt disjoint mismatch at " + pair_name);
            if (!result.passed) break;

            const auto mu2 = oracle::set_union(detail::keys_to_elems<std::int64_t>(models[i]),
                                               detail::keys_to_elems<std::int64_t>(models[j]));
            const auto mx2 = oracle::set_intersection(
                detail::keys_to_elems<std::int64_t>(models[i]),
                detail::keys_to_elems<std::int64_t>(models[j]));
            const auto md2 = oracle::set_difference(detail::keys_to_elems<std::int64_t>(models[i]),
                                                    detail::keys_to_elems<std::int64_t>(models[j]));
            if (wb::to_asc_list(wb::set_union(wbs[i], wbs[j])) != mu2)
                fail("wb union mismatch at " + pair_name);
            else if (wb::to_asc_list(wb::set_intersection(wbs[i], wbs[j])) != mx2)
                fail("wb intersection mismatch at " + pair_name);
            else if (wb::to_asc_list(wb::set_difference(wbs[i], wbs[j])) != md2)
                fail("wb difference mismatch at " + pair_name);
            else if (wb::is_subset_of(wbs[i], wbs[j]) !=
                     oracle::is_subset(detail::keys_to_elems<std::int64_t>(models[i]),
                                       detail::keys_to_elems<std::int64_t>(models[j])))
                fail("wb subset mismatch at " + pair_name);
            else if (wb::equals(wbs[i], wbs[j]) != (models[i] == models[j]))
                fail("wb equality mismatch at " + pair_name);
            else if (wb::disjoint(wbs[i], wbs[j]) != x.empty())
                fail("wb disjoint mismatch at " + pair_name);
            ++cases;
        }
    }

    const std::uint64_t universe = std::uint64_t{1} << bits;
    for (std::size_t i = 0; i < n && result.passed; ++i) {
        for (std::uint64_t k = 0; k < universe && result.passed; ++k) {
            const auto [mlo, mfound, mhi] = oracle::split(models[i], k);
            const auto [plo, phi] = pt::split(pts[i], k);
            const auto pm = pt::split_member(pts[i], k);
            if (pt::to_asc_list(plo) != mlo || pt::to_asc_list(phi) != mhi)
                fail("pt split mismatch at subset " + std::to_string(i) + " key " +
                     std::to_string(k));
            else if (pm.found != mfound)
                fail("pt split_member mismatch at subset " + std::to_string(i));
            const std::int64_t ik = static_cast<std::int64_t>(k);
            const auto [wlo, whi] = wb::split(wbs[i], ik);
            const auto wm = wb::split_member(wbs[i], ik);
            if (wb::to_asc_list(wlo) != detail::keys_to_elems<std::int64_t>(mlo) ||
                wb::to_asc_list(whi) != detail::keys_to_elems<std::int64_t>(mhi))
                fail("wb split mismatch at subset " + std::to_string(i) + " key " +
                     std::to_string(k));
            else if (wm.found != mfound)
                fail("wb split_member mismatch at subset " + std::to_string(i));
            ++cases;
        }
    }

    result.cases_run = static_cast<int>(std::min<long long>(cases, INT32_MAX));
    return result;
}

// ---------------------------------------------------------------------
// Random valid trees and the corruption catalog for checker testing.

inline wb::tree<std::int64_t> random_wb_tree(script::rng& r, std::size_t min_size,
                                             std::size_t max_size, std::uint64_t range) {
    for (;;) {
        const std::size_t n = min_size + r.below(max_size - min_size + 1);
        std::vector<std::uint64_t> keys = script::gen_keys(r, n + min_size, range);
        wb::tree<std::int64_t> t;
        for (std::uint64_t k : keys) t = wb::insert(t, static_cast<std::int64_t>(k));
        if (static_cast<std::size_t>(wb::size(t)) >= min_size) return t;
    }
}

// When require_bin is set the result contains at least one interior node.
inline pt::tree random_pt_tree(script::rng& r, std::size_t min_size, std::size_t max_size,
                               std::uint64_t range, bool require_bin = false) {
    for (;;) {
        const std::size_t n = min_size + r.below(max_size - min_size + 1);
        const pt::tree t = pt::from_list(script::gen_keys(r, n + min_size, range));
        if (static_cast<std::size_t>(pt::size(t)) < min_size) continue;
        if (require_bin && (!t || !t->is_bin)) continue;
        return t;
    }
}

inline constexpr int wb_mutation_kinds = 5;
inline constexpr int pt_mutation_kinds = 6;

namespace detail {

template <typename F>
wb::tree<std::int64_t> wb_rebuild(const wb::tree<std::int64_t>& t,
                                  const std::vector<bool>& path, std::size_t i, const F& f) {
    if (i == path.size()) return f(t);
    if (!path[i])
        return wb::make_node(t->size, t->elem, wb_rebuild(t->left, path, i + 1, f), t->right);
    return wb::make_node(t->size, t->elem, t->left, wb_rebuild(t->right, path, i + 1, f));
}

inline void wb_collect(const wb::tree<std::int64_t>& t, std::vector<bool>& path,
                       std::vector<std::vector<bool>>& out,
                       const std::function<bool(const wb::node<std::int64_t>&)>& want) {
    if (!t) return;
    if (want(*t)) out.push_back(path);
    path.push_back(false);
    wb_collect(t->left, path, out, want);
    path.back() = true;
    wb_collect(t->right, path, out, want);
    path.pop_back();
}

inline wb::tree<std::int64_t> wb_right_spine(const std::vector<std::int64_t>& xs, std::size_t i) {
    if (i == xs.size()) return {};
    return wb::make_node(static_cast<std::int64_t>(xs.size() - i), xs[i], wb::tree<std::int64_t>{},
                         wb_right_spine(xs, i + 1));
}

template <typename F>
pt::tree pt_rebuild(const pt::tree& t, const std::vector<bool>& path, std::size_t i, const F& f) {
    if (i == path.size()) return f(t);
    if (!path[i])
        return pt::make_bin(t->prefix, t->mask, pt_rebuild(t->left, path, i + 1, f), t->right);
    return pt::make_bin(t->prefix, t->mask, t->left, pt_rebuild(t->right, path, i + 1, f));
}

inline void pt_collect(const pt::tree& t, std::vector<bool>& path,
                       std::vector<std::vector<bool>>& out,
                       const std::function<bool(const pt::node&)>& want) {
    if (!t) return;
    if (want(*t)) out.push_back(path);
    if (t->is_bin) {
        path.push_back(false);
        pt_collect(t->left, path, out, want);
        path.back() = true;
        pt_collect(t->right, path, out, want);
        path.pop_back();
    }
}

}  // namespace detail

// Applies one corruption of the given kind at a random applicable node:
//   0: stored size bumped up    1: stored size bumped down
//   2: children swapped         3: element copied over a subtree bound
//   4: subtree rebuilt as an unbalanced spine (needs a subtree of size 3+)
// Returns nothing when no node admits the mutation.
inline std::optional<wb::tree<std::int64_t>> mutate_wb(const wb::tree<std::int64_t>& t, int kind,
                                                       script::rng& r,
                                                       std::string* desc = nullptr) {
    using tree_t = wb::tree<std::int64_t>;
    std::vector<std::vector<bool>> spots;
    std::vector<bool> path;
    const auto pick = [&](const std::function<bool(const wb::node<std::int64_t>&)>& want)
        -> std::optional<std::vector<bool>> {
        spots.clear();
        path.clear();
        detail::wb_collect(t, path, spots, want);
        if (spots.empty()) return std::nullopt;
        return spots[r.below(spots.size())];
    };
    const auto set_desc = [&](std::string_view d) {
        if (desc) *desc = d;
    };
    switch (kind) {
        case 0:
        case 1: {
            auto at = pick([](const auto&) { return true; });
            if (!at) return std::nullopt;
            set_desc(kind == 0 ? "size field bumped up" : "size field bumped down");
            const std::int64_t delta_sz = kind == 0 ? 1 : -1;
            return detail::wb_rebuild(t, *at, 0, [&](const tree_t& n) {
                return wb::make_node(n->size + delta_sz, n->elem, n->left, n->right);
            });
        }
        case 2: {
            auto at = pick([](const auto& n) { return n.left || n.right; });
            if (!at) return std::nullopt;
            set_desc("children swapped");
            return detail::wb_rebuild(t, *at, 0, [&](const tree_t& n) {
                return wb::make_node(n->size, n->elem, n->right, n->left);
            });
        }
        case 3: {
            auto at = pick([](const auto& n) { return n.left || n.right; });
            if (!at) return std::nullopt;
            set_desc("element clamped onto a subtree bound");
            return detail::wb_rebuild(t, *at, 0, [&](const tree_t& n) {
                const std::int64_t dup =
                    n->left ? *wb::lookup_max(n->left) : *wb::lookup_min(n->right);
                return wb::make_node(n->size, dup, n->left, n->right);
            });
        }
        case 4: {
            auto at = pick([](const auto& n) { return n.size >= 3; });
            if (!at) return std::nullopt;
            set_desc("subtree rebuilt as a spine");
            return detail::wb_rebuild(t, *at, 0, [&](const tree_t& n) {
                return detail::wb_right_spine(wb::to_asc_list(n), 0);
            });
        }
        default:
            return std::nullopt;
    }
}

// Patricia corruption kinds:
//   0: tip bitmap cleared        1: tip prefix misaligned
//   2: child replaced by empty   3: children swapped
//   4: mask made a non-power     5: prefix polluted with the mask bit
inline std::optional<pt::tree> mutate_pt(const pt::tree& t, int kind, script::rng& r,
                                         std::string* desc = nullptr) {
    std::vector<std::vector<bool>> spots;
    std::vector<bool> path;
    const auto pick = [&](const std::function<bool(const pt::node&)>& want)
        -> std::optional<std::vector<bool>> {
        spots.clear();
        path.clear();
        detail::pt_collect(t, path, spots, want);
        if (spots.empty()) return std::nullopt;
        return spots[r.below(spots.size())];
    };
    const auto set_desc = [&](std::string_view d) {
        if (desc) *desc = d;
    };
    const auto is_tip = [](const pt::node& n) { return !n.is_bin; };
    const auto is_bin = [](const pt::node& n) { return n.is_bin; };
    switch (kind) {
        case 0: {
            auto at = pick(is_tip);
            if (!at) return std::nullopt;
            set_desc("tip bitmap cleared");
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_tip(n->prefix, 0);
            });
        }
        case 1: {
            auto at = pick(is_tip);
            if (!at) return std::nullopt;
            set_desc("tip prefix misaligned");
            const std::uint64_t low = 1 + r.below(63);
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_tip(n->prefix | low, n->bitmap);
            });
        }
        case 2: {
            auto at = pick(is_bin);
            if (!at) return std::nullopt;
            set_desc("child replaced by empty");
            const bool right = r.chance(50);
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_bin(n->prefix, n->mask, right ? n->left : pt::tree{},
                                    right ? pt::tree{} : n->right);
            });
        }
        case 3: {
            auto at = pick(is_bin);
            if (!at) return std::nullopt;
            set_desc("children swapped");
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_bin(n->prefix, n->mask, n->right, n->left);
            });
        }
        case 4: {
            auto at = pick(is_bin);
            if (!at) return std::nullopt;
            set_desc("mask made a non-power of two");
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_bin(n->prefix, n->mask - 1, n->left, n->right);
            });
        }
        case 5: {
            auto at = pick(is_bin);
            if (!at) return std::nullopt;
            set_desc("prefix polluted with the mask bit");
            return detail::pt_rebuild(t, *at, 0, [&](const pt::tree& n) {
                return pt::make_bin(n->prefix | n->mask, n->mask, n->left, n->right);
            });
        }
        default:
            return std::nullopt;
    }
}

// ---------------------------------------------------------------------
// Rebalance precondition audit.

struct audit_outcome {
    std::uint64_t calls = 0;
    std::uint64_t violations = 0;
    std::uint64_t historical_only = 0;  // older precondition failed, current one held
};

// Runs generated workloads plus directed skewed joins under the audit
// hook.  The directed case joins a 4-element tree with a (9, 3)-shaped
// one, which drives the rebalance entry to sizes (14, 3): there the older
// precondition fails while the current one holds.
inline audit_outcome run_balance_audit(std::uint64_t seed, int num_scripts, int ops_per_script) {
    auto& st = wb::audit::stats();
    st.reset();
    wb::audit::enabled = true;

    for (int i = 0; i < num_scripts; ++i) {
        const auto sc = script::generate_script(script::mix_seed(seed, i), ops_per_script);
        (void)run_lockstep<wb_adapter>(sc, law::validity);
    }

    script::rng r(seed);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t nl = static_cast<std::int64_t>(r.below(24));
        const std::int64_t nr = static_cast<std::int64_t>(r.below(72));
        std::vector<std::int64_t> lo, hi;
        for (std::int64_t k = 0; k < nl; ++k) lo.push_back(k);
        for (std::int64_t k = 0; k < nr; ++k) hi.push_back(1000 + k);
        const auto joined = wb::link(std::int64_t{500},
                                     wb::from_distinct_asc_list(std::span<const std::int64_t>(lo)),
                                     wb::from_distinct_asc_list(std::span<const std::int64_t>(hi)));
        if (!validity::check_wbset(joined).ok()) {
            wb::audit::enabled = false;
            return {st.calls.load(), st.violations.load() + 1, st.historical_only_failures.load()};
        }
    }

    {
        std::vector<std::int64_t> four = {1, 2, 3, 4};
        std::vector<std::int64_t> nine = {101, 102, 103, 104, 105, 106, 107, 108, 109};
        std::vector<std::int64_t> three = {111, 112, 113};
        const auto skewed_right =
            wb::bin(std::int64_t{110}, wb::from_distinct_asc_list(std::span<const std::int64_t>(nine)),
                    wb::from_distinct_asc_list(std::span<const std::int64_t>(three)));
        const auto joined =
            wb::link(std::int64_t{50},
                     wb::from_distinct_asc_list(std::span<const std::int64_t>(four)), skewed_right);
        if (!validity::check_wbset(joined).ok()) {
            wb::audit::enabled = false;
            return {st.calls.load(), st.violations.load() + 1, st.historical_only_failures.load()};
        }
    }

    wb::audit::enabled = false;
    return {st.calls.load(), st.violations.load(), st.historical_only_failures.load()};
}

// ---------------------------------------------------------------------
// Microbenchmarks.

struct bench_row {
    std::string op;
    std::uint64_t size = 0;
    int reps = 0;
    double ns_per_op_median = 0.0;
    std::uint64_t checksum = 0;
};

inline std::string bench_csv_header() {
    return "op,size,reps,ns_per_op_median,checksum";
}

inline std::string bench_csv_row(const bench_row& row) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%llu,%d,%.1f,%llu", row.op.c_str(),
                  static_cast<unsigned long long>(row.size), row.reps, row.ns_per_op_median,
                  static_cast<unsigned long long>(row.checksum));
    return buf;
}

namespace detail {

// Median wall time of reps runs of body(), one discarded warm-up round,
// divided by ops_per_rep.
template <typename Body>
double time_median_ns(int reps, std::uint64_t ops_per_rep, Body&& body) {
    body();  // warm-up
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto begin = std::chrono::steady_clock::now();
        body();
        const auto end = std::chrono::steady_clock::now();
        const double ns =
            static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(end - begin)
                                    .count());
        samples.push_back(ns / static_cast<double>(ops_per_rep == 0 ? 1 : ops_per_rep));
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

}  // namespace detail

inline const std::vector<std::string>& bench_ops() {
    static const std::vector<std::string> ops = {
        "wb.member", "wb.insert", "wb.union", "wb.union.singleton",
        "pt.member", "pt.insert", "pt.union",
    };
    return ops;
}

// Runs one registered benchmark; "wb.union.singleton" reports both the
// shortcut and the generic route and insists their results agree on every
// measured input.
inline std::vector<bench_row> run_bench(std::string_view op_name, std::uint64_t size, int reps,
                                        std::uint64_t seed = 0x5e7f04c3) {
    script::rng r(seed);
    const std::uint64_t range = size * 4 + 64;
    std::vector<std::uint64_t> keys;
    keys.reserve(size);
    for (std::uint64_t i = 0; i < size; ++i) keys.push_back(r.below(range));
    constexpr int probe_batch = 512;
    std::vector<std::uint64_t> probes;
    for (int i = 0; i < probe_batch; ++i) probes.push_back(r.below(range));

    std::vector<bench_row> rows;
    std::uint64_t checksum = 0;

    if (op_name == "wb.member" || op_name == "wb.insert" || op_name == "wb.union" ||
        op_name == "wb.union.singleton") {
        wb::tree<std::int64_t> t;
        for (std::uint64_t k : keys) t = wb::insert(t, static_cast<std::int64_t>(k));
        if (op_name == "wb.member") {
            const double ns = detail::time_median_ns(reps, probe_batch, [&] {
                for (std::uint64_t p : probes)
                    checksum += wb::member(t, static_cast<std::int64_t>(p)) ? 1 : 0;
            });
            rows.push_back({"wb.member", size, reps, ns, checksum});
        } else if (op_name == "wb.insert") {
            const double ns = detail::time_median_ns(reps, probe_batch, [&] {
                auto t2 = t;
                for (std::uint64_t p : probes) t2 = wb::insert(t2, static_cast<std::int64_t>(p));
                checksum += static_cast<std::uint64_t>(wb::size(t2));
            });
            rows.push_back({"wb.insert", size, reps, ns, checksum});
        } else if (op_name == "wb.union") {
            wb::tree<std::int64_t> other;
            for (int i = 0; i < probe_batch; ++i)
                other = wb::insert(other, static_cast<std::int64_t>(r.below(range)));
            const double ns = detail::time_median_ns(reps, 1, [&] {
                checksum += static_cast<std::uint64_t>(wb::size(wb::set_union(t, other)));
            });
            rows.push_back({"wb.union", size, reps, ns, checksum});
        } else {
            const auto one = wb::single(static_cast<std::int64_t>(r.below(range)));
            const double ns_fast = detail::time_median_ns(reps, 1, [&] {
                checksum += static_cast<std::uint64_t>(wb::size(wb::set_union(t, one)));
            });
            rows.push_back({"wb.union.singleton.fast", size, reps, ns_fast, checksum});
            {
                faults::scoped_fault off(faults::wb_union_disable_singleton_fastpath);
                const double ns_generic = detail::time_median_ns(reps, 1, [&] {
                    checksum += static_cast<std::uint64_t>(wb::size(wb::set_union(t, one)));
                });
                rows.push_back({"wb.union.singleton.generic", size, reps, ns_generic, checksum});
                const auto generic = wb::set_union(t, one);
                faults::wb_union_disable_singleton_fastpath = false;
                const auto fast = wb::set_union(t, one);
                if (!wb::equals(fast, generic))
                    throw std::runtime_error(
                        "singleton union shortcut disagrees with the generic route");
            }
        }
        return rows;
    }

    if (op_name == "pt.member" || op_name == "pt.insert" || op_name == "pt.union") {
        const pt::tree t = pt::from_list(keys);
        if (op_name == "pt.member") {
            const double ns = detail::time_median_ns(reps, probe_batch, [&] {
                for (std::uint64_t p : probes) checksum += pt::member(t, p) ? 1 : 0;
            });
            rows.push_back({"pt.member", size, reps, ns, checksum});
        } else if (op_name == "pt.insert") {
            const double ns = detail::time_median_ns(reps, probe_batch, [&] {
                auto t2 = t;
                for (std::uint64_t p : probes) t2 = pt::insert(t2, p);
                checksum += static_cast<std::uint64_t>(pt::size(t2));
            });
            rows.push_back({"pt.insert", size, reps, ns, checksum});
        } else {
            pt::tree other;
            for (int i = 0; i < probe_batch; ++i) other = pt::insert(other, r.below(range));
            const double ns = detail::time_median_ns(reps, 1, [&] {
                checksum += static_cast<std::uint64_t>(pt::size(pt::set_union(t, other)));
            });
            rows.push_back({"pt.union", size, reps, ns, checksum});
        }
        return rows;
    }

    throw std::invalid_argument("unknown bench op: " + std::string(op_name));
}

}  // namespace setforge::harness

