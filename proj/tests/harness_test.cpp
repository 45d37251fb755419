#include "setforge/harness.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "setforge/faults.hpp"
#include "setforge/script.hpp"

namespace harness = setforge::harness;
namespace script = setforge::script;
namespace faults = setforge::faults;

TEST(Script, TextRoundTrip) {
    const auto sc = script::generate_script(0x1234, 30);
    const auto text = script::to_text(sc);
    const auto back = script::from_text(text);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->seed, sc.seed);
    ASSERT_EQ(back->ops.size(), sc.ops.size());
    for (std::size_t i = 0; i < sc.ops.size(); ++i) {
        EXPECT_EQ(back->ops[i].code, sc.ops[i].code);
        EXPECT_EQ(back->ops[i].keys, sc.ops[i].keys);
        EXPECT_EQ(back->ops[i].keep_odd, sc.ops[i].keep_odd);
    }
    EXPECT_FALSE(script::from_text("no seed line").has_value());
    EXPECT_FALSE(script::from_text("seed=00ff\nbogus-op 1").has_value());
}

TEST(Script, GenerationIsDeterministic) {
    const auto a = script::generate_script(77, 50);
    const auto b = script::generate_script(77, 50);
    EXPECT_EQ(script::to_text(a), script::to_text(b));
}

TEST(Properties, CatalogCoversBothStructuresAndBits) {
    int wb_count = 0, pt_count = 0, bit_count = 0;
    for (const auto& p : harness::catalog()) {
        if (p.id.starts_with("wb.")) ++wb_count;
        if (p.id.starts_with("pt.")) ++pt_count;
        if (p.id.starts_with("bit.")) ++bit_count;
    }
    EXPECT_GE(wb_count, 13);
    EXPECT_GE(pt_count, 13);
    EXPECT_GE(bit_count, 6);
}

TEST(Properties, CleanBuildPassesEverything) {
    for (const auto& p : harness::catalog()) {
        const auto res = harness::run_property(p.id, 60, 0xabcddcba);
        EXPECT_TRUE(res.passed) << p.id << ": " << res.diagnostics;
    }
}

TEST(Properties, VacuousRunAndUnknownId) {
    const auto res = harness::run_property("wb.wf-after-ops", 0, 1);
    EXPECT_TRUE(res.passed);
    EXPECT_EQ(res.cases_run, 0);
    EXPECT_THROW(harness::run_property("wb.nonsense", 10, 1), std::invalid_argument);
}

TEST(Properties, DeterministicResults) {
    faults::scoped_fault fault(faults::pt_intersection_wrong_bitmap_op);
    const auto a = harness::run_property("pt.oracle-equiv", 200, 0x5eed);
    const auto b = harness::run_property("pt.oracle-equiv", 200, 0x5eed);
    EXPECT_EQ(a.passed, b.passed);
    ASSERT_TRUE(a.counterexample.has_value());
    ASSERT_TRUE(b.counterexample.has_value());
    EXPECT_EQ(script::to_text(*a.counterexample), script::to_text(*b.counterexample));
    EXPECT_EQ(a.diagnostics, b.diagnostics);
}

TEST(FaultInjection, EachFaultBreaksAPropertyWithASmallScript) {
    struct case_t {
        std::atomic<bool>* fault;
        const char* prop;
    };
    const case_t cases[] = {
        {&faults::pt_union_drop_nomatch, "pt.oracle-equiv"},
        {&faults::wb_insert_skip_rebalance, "wb.wf-after-ops"},
        {&faults::pt_intersection_wrong_bitmap_op, "pt.oracle-equiv"},
    };
    for (const auto& c : cases) {
        faults::scoped_fault guard(*c.fault);
        const auto res = harness::run_property(c.prop, 400, 0x600dcafe);
        EXPECT_FALSE(res.passed) << c.prop;
        ASSERT_TRUE(res.counterexample.has_value());
        EXPECT_LE(res.counterexample->ops.size(), 10u)
            << script::to_text(*res.counterexample);
        // The shrunk script must still fail on replay.
        const auto* p = harness::find_property(c.prop);
        ASSERT_NE(p, nullptr);
        EXPECT_TRUE(p->eval(*res.counterexample).has_value());
    }
    // All switches restored: the same properties pass again.
    for (const auto& c : cases)
        EXPECT_TRUE(harness::run_property(c.prop, 100, 0x600dcafe).passed);
}

TEST(Exhaustive, SmallUniverses) {
    for (int bits : {0, 1, 3, 4}) {
        const auto res = harness::run_exhaustive(bits);
        EXPECT_TRUE(res.passed) << res.diagnostics;
    }
    EXPECT_THROW(harness::run_exhaustive(9), std::invalid_argument);
}

TEST(Exhaustive, CatchesASabotagedIntersection) {
    faults::scoped_fault fault(faults::pt_intersection_wrong_bitmap_op);
    const auto res = harness::run_exhaustive(3);
    EXPECT_FALSE(res.passed);
    EXPECT_NE(res.diagnostics.find("intersection"), std::string::npos);
}

TEST(BalanceAudit, NoViolationsAndHistoricalWitness) {
    const auto out = harness::run_balance_audit(0xa0d17, 100, 80);
    EXPECT_GT(out.calls, 0u);
    EXPECT_EQ(out.violations, 0u);
    EXPECT_GE(out.historical_only, 1u);
}

TEST(Bench, RowsAndSingletonEquality) {
    for (const auto& op : harness::bench_ops()) {
        const auto rows = harness::run_bench(op, op.ends_with("union") ? 2000 : 4000, 5);
        ASSERT_FALSE(rows.empty()) << op;
        for (const auto& row : rows) {
            EXPECT_GT(row.ns_per_op_median, 0.0);
            EXPECT_EQ(row.reps, 5);
        }
    }
    // Two rows for the singleton comparison, shortcut and generic.
    const auto rows = harness::run_bench("wb.union.singleton", 1000, 3);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].op, "wb.union.singleton.fast");
    EXPECT_EQ(rows[1].op, "wb.union.singleton.generic");

    // Zero-size inputs still produce rows.
    const auto empty_rows = harness::run_bench("pt.member", 0, 3);
    ASSERT_EQ(empty_rows.size(), 1u);
    EXPECT_EQ(empty_rows[0].size, 0u);

    EXPECT_THROW(harness::run_bench("wb.nonsense", 10, 2), std::invalid_argument);
}

TEST(Fuzz, CleanAndSabotaged) {
    const auto clean = harness::run_fuzz<harness::pt_adapter>(60, 0x0ff1ce, 60);
    EXPECT_TRUE(clean.passed) << clean.diagnostics;
    faults::scoped_fault fault(faults::pt_union_drop_nomatch);
    const auto broken = harness::run_fuzz<harness::pt_adapter>(120, 0x0ff1ce, 60);
    EXPECT_FALSE(broken.passed);
    ASSERT_TRUE(broken.counterexample.has_value());
    EXPECT_LE(broken.counterexample->ops.size(), 10u);
}
