#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string_view>

// Test instrumentation.
//
// The fault switches sabotage one specific step of an operation so the
// property harness can demonstrate that its checks catch the breakage.
// They are off by default and must stay off in normal use.
//
// The fastpath switch disables the size-1 shortcut of the weight-balanced
// union so benchmarks can compare the two routes; both routes must agree.

namespace setforge::faults {

// Skip the prefix mismatch test in the Patricia Bin/Bin union merge.
inline std::atomic<bool> pt_union_drop_nomatch{false};

// Build plain nodes instead of rebalancing in weight-balanced insert.
inline std::atomic<bool> wb_insert_skip_rebalance{false};

// Combine tip bitmaps with OR instead of AND in Patricia intersection.
inline std::atomic<bool> pt_intersection_wrong_bitmap_op{false};

// Not a fault: routes wb union around the singleton shortcut.
inline std::atomic<bool> wb_union_disable_singleton_fastpath{false};

inline constexpr std::string_view fault_names[] = {
    "pt.union.drop-nomatch",
    "wb.insert.skip-rebalance",
    "pt.intersection.wrong-bitmap-op",
};

inline std::atomic<bool>* fault_by_name(std::string_view name) {
    if (name == fault_names[0]) return &pt_union_drop_nomatch;
    if (name == fault_names[1]) return &wb_insert_skip_rebalance;
    if (name == fault_names[2]) return &pt_intersection_wrong_bitmap_op;
    return nullptr;
}

inline void clear_all() {
    pt_union_drop_nomatch = false;
    wb_insert_skip_rebalance = false;
    pt_intersection_wrong_bitmap_op = false;
    wb_union_disable_singleton_fastpath = false;
}

// RAII guard: enables one switch for the lifetime of the guard.
class scoped_fault {
  public:
    explicit scoped_fault(std::atomic<bool>& flag) : flag_(flag) { flag_.store(true); }
    ~scoped_fault() { flag_.store(false); }
    scoped_fault(const scoped_fault&) = delete;
    scoped_fault& operator=(const scoped_fault&) = delete;

  private:
    std::atomic<bool>& flag_;
};

}  // namespace setforge::faults
