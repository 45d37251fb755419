// Acceptance suite: runs every criterion at its stated threshold and
// prints one PASS/FAIL line per criterion.  Exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "setforge/faults.hpp"
#include "setforge/harness.hpp"
#include "setforge/oracle.hpp"
#include "setforge/script.hpp"
#include "setforge/validity.hpp"

namespace harness = setforge::harness;
namespace oracle = setforge::oracle;
namespace pt = setforge::pt;
namespace wb = setforge::wb;
namespace validity = setforge::validity;
namespace faults = setforge::faults;
using setforge::script::rng;

namespace {

int failures = 0;

struct timer {
    std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    }
};

void report(int criterion, const char* title, bool ok, const std::string& detail,
            double seconds) {
    std::printf("[%s] %d. %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", criterion, title,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1. Exhaustive oracle equivalence over the 8-bit universe, via the CLI.
void criterion_exhaustive() {
    timer t;
    const int code = run_command(std::string(SETFORGE_CLI_PATH) + " exhaustive --bits 8");
    const auto inproc = harness::run_exhaustive(8);
    const bool ok = code == 0 && inproc.passed;
    report(1, "exhaustive oracle equivalence (bits=8)", ok,
           ok ? std::to_string(inproc.cases_run) + " checks, zero mismatches"
              : "cli exit " + std::to_string(code) + "; " + inproc.diagnostics,
           t.seconds());
}

// 2. Well-formedness preserved across 10^4 random 200-op scripts per
// structure, checking every intermediate tree.
void criterion_wf_preservation() {
    timer t;
    constexpr int scripts = 10000;
    constexpr int ops = 200;
    std::string detail;
    bool ok = true;
    const auto wb_res = harness::run_fuzz<harness::wb_adapter>(scripts, 0x1dea1, ops);
    if (!wb_res.passed) {
        ok = false;
        detail = "wb: " + wb_res.diagnostics;
    }
    const auto pt_res = harness::run_fuzz<harness::pt_adapter>(scripts, 0x1dea2, ops);
    if (!pt_res.passed) {
        ok = false;
        detail += " pt: " + pt_res.diagnostics;
    }
    if (ok)
        detail = std::to_string(2 * scripts) + " scripts of " + std::to_string(ops) +
                 " ops, every intermediate tree valid";
    report(2, "well-formedness preservation", ok, detail, t.seconds());
}

// 3. Patricia representation uniqueness over 10^3 random key sets of
// sizes 0..500, two insertion orders each; structural equality matches
// model equality.
void criterion_uniqueness() {
    timer t;
    rng r(0x31337);
    bool ok = true;
    std::string detail;
    std::vector<pt::tree> built;
    std::vector<oracle::model<std::uint64_t>> models;
    for (int i = 0; i < 1000 && ok; ++i) {
        const std::size_t target = r.below(501);
        const auto keys = setforge::script::gen_keys(r, target, std::uint64_t{1} << 44);
        std::vector<std::uint64_t> shuffled = keys;
        for (std::size_t j = shuffled.size(); j > 1; --j)
            std::swap(shuffled[j - 1], shuffled[r.below(j)]);
        const auto a = pt::from_list(keys);
        const auto b = pt::from_list(shuffled);
        if (!pt::equals(a, b)) {
            ok = false;
            detail = "insertion order changed the representation at set " + std::to_string(i);
        }
        built.push_back(a);
        models.push_back(oracle::from_values(keys));
    }
    for (std::size_t i = 0; i + 1 < built.size() && ok; i += 2) {
        if (pt::equals(built[i], built[i + 1]) != (models[i] == models[i + 1])) {
            ok = false;
            detail = "structural equality disagrees with model equality";
        }
    }
    if (ok) detail = "1000 key sets, two orders each, zero exceptions";
    report(3, "patricia representation uniqueness", ok, detail, t.seconds());
}

// 4. Every corruption in the catalog is rejected: >= 5 kinds x >= 50
// random valid trees per structure, 100% kill rate.
void criterion_mutation_kill() {
    timer t;
    rng r(0x4a11);
    int killed = 0, survived = 0, applied = 0;
    std::string detail;
    for (int kind = 0; kind < harness::wb_mutation_kinds; ++kind) {
        int done = 0;
        while (done < 50) {
            const auto tree = harness::random_wb_tree(r, kind == 4 ? 3 : 2, 120, 1 << 18);
            std::string what;
            const auto bad = harness::mutate_wb(tree, kind, r, &what);
            if (!bad) continue;
            ++done;
            ++applied;
            if (validity::check_wbset(*bad).ok()) {
                ++survived;
                detail = "wb survivor: " + what;
            } else {
                ++killed;
            }
        }
    }
    for (int kind = 0; kind < harness::pt_mutation_kinds; ++kind) {
        int done = 0;
        while (done < 50) {
            const auto tree =
                harness::random_pt_tree(r, 2, 120, std::uint64_t{1} << 36, kind >= 2);
            std::string what;
            const auto bad = harness::mutate_pt(tree, kind, r, &what);
            if (!bad) continue;
            ++done;
            ++applied;
            if (validity::check_patricia(*bad).ok()) {
                ++survived;
                detail = "pt survivor: " + what;
            } else {
                ++killed;
            }
        }
    }
    const bool ok = survived == 0;
    if (ok)
        detail = std::to_string(killed) + "/" + std::to_string(applied) +
                 " corruptions rejected across " +
                 std::to_string(harness::wb_mutation_kinds + harness::pt_mutation_kinds) +
                 " kinds";
    report(4, "mutation kill rate 100%", ok, detail, t.seconds());
}

// 5. Every registered property passes 10^3 cases; each documented fault
// injection breaks at least one property with a counterexample of <= 10
// ops.
void criterion_property_suite() {
    timer t;
    bool ok = true;
    std::string detail;
    int ran = 0;
    for (const auto& p : harness::catalog()) {
        const auto res = harness::run_property(p.id, 1000, 0xacce97);
        ++ran;
        if (!res.passed) {
            ok = false;
            detail = p.id + " failed clean: " + res.diagnostics;
            break;
        }
    }
    struct injection {
        std::atomic<bool>* fault;
        const char* name;
        std::vector<const char*> props;
    };
    const injection injections[] = {
        {&faults::pt_union_drop_nomatch, "pt.union.drop-nomatch",
         {"pt.oracle-equiv", "pt.wf-after-ops", "pt.union-assoc"}},
        {&faults::wb_insert_skip_rebalance, "wb.insert.skip-rebalance",
         {"wb.wf-after-ops"}},
        {&faults::pt_intersection_wrong_bitmap_op, "pt.intersection.wrong-bitmap-op",
         {"pt.oracle-equiv", "pt.demorgan"}},
    };
    for (const auto& inj : injections) {
        if (!ok) break;
        faults::scoped_fault guard(*inj.fault);
        bool caught = false;
        for (const char* prop : inj.props) {
            const auto res = harness::run_property(prop, 1000, 0xacce97);
            if (!res.passed && res.counterexample &&
                res.counterexample->ops.size() <= 10) {
                caught = true;
                break;
            }
        }
        if (!caught) {
            ok = false;
            detail = std::string("fault ") + inj.name +
                     " was not caught with a <=10-op counterexample";
        }
    }
    if (ok)
        detail = std::to_string(ran) +
                 " properties at 1000 cases; all three faults caught with small scripts";
    report(5, "property suite and fault injections", ok, detail, t.seconds());
}

// 6. Rebalance precondition audit, run in a separate binary compiled with
// assertions enabled; it also must exhibit a call where the older
// precondition fails while the current one holds.
void criterion_balance_audit() {
    timer t;
    const int code = run_command(std::string(SETFORGE_AUDIT_PATH));
    const auto in_proc = harness::run_balance_audit(0xa0d17, 2000, 200);
    const bool ok = code == 0 && in_proc.violations == 0 && in_proc.historical_only >= 1;
    report(6, "rebalance precondition audit", ok,
           "calls=" + std::to_string(in_proc.calls) +
               ", violations=" + std::to_string(in_proc.violations) +
               ", historical-only failures=" + std::to_string(in_proc.historical_only) +
               ", checked binary exit " + std::to_string(code),
           t.seconds());
}

// 7. Word-level primitives agree with their naive per-bit oracles on at
// least 10^5 random inputs each.
void criterion_bitops() {
    timer t;
    bool ok = true;
    std::string detail;
    const char* ids[] = {"bit.rev-involution", "bit.rev-oracle", "bit.single-bit-oracle",
                         "bit.mask-ops-oracle", "bit.branch-mask-law", "bit.prefix-suffix",
                         "bit.andnot-xor"};
    for (const char* id : ids) {
        // 7000 cases x 32 words: at least 10^5 random inputs per property,
        // also counting pairwise laws that consume two words per check.
        const auto res = harness::run_property(id, 7000, 0xb17b17);
        if (!res.passed) {
            ok = false;
            detail = std::string(id) + ": " + res.diagnostics;
            break;
        }
    }
    if (ok) detail = "7 word-level properties x 224000 random words, zero failures";
    report(7, "word-level primitives against naive oracles", ok, detail, t.seconds());
}

// 8. Singleton-union shortcut agrees with the generic route on 10^4
// random pairs; the two timings are reported for information only.
void criterion_singleton_union() {
    timer t;
    rng r(0x516);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 10000 && ok; ++i) {
        const auto keys = setforge::script::gen_keys(r, r.below(120), 1 << 12);
        wb::tree<std::int64_t> tree;
        for (auto k : keys) tree = wb::insert(tree, static_cast<std::int64_t>(k));
        const auto one = wb::single(static_cast<std::int64_t>(r.below(1 << 12)));
        const bool flip = r.chance(50);
        const auto fast = flip ? wb::set_union(one, tree) : wb::set_union(tree, one);
        faults::wb_union_disable_singleton_fastpath = true;
        const auto generic = flip ? wb::set_union(one, tree) : wb::set_union(tree, one);
        faults::wb_union_disable_singleton_fastpath = false;
        if (!wb::equals(fast, generic)) {
            ok = false;
            detail = "shortcut and generic union disagree at pair " + std::to_string(i);
        }
    }
    if (ok) {
        const auto rows = harness::run_bench("wb.union.singleton", 20000, 21);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "10000 pairs equal; timings ns/op: fast=%.0f generic=%.0f",
                      rows[0].ns_per_op_median, rows[1].ns_per_op_median);
        detail = buf;
    }
    report(8, "singleton-union shortcut equivalence", ok, detail, t.seconds());
}

}  // namespace

int main() {
    criterion_exhaustive();
    criterion_wf_preservation();
    criterion_uniqueness();
    criterion_mutation_kill();
    criterion_property_suite();
    criterion_balance_audit();
    criterion_bitops();
    criterion_singleton_union();
    if (failures == 0) {
        std::printf("acceptance: all 8 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
