// Rebalance precondition audit under enabled assertions.  Built without
// NDEBUG, so every balance_left/balance_right entry re-checks its
// precondition and aborts on violation; the workloads here are all valid
// inputs.  Exits nonzero unless the audit also finds at least one call
// where the older precondition fails while the current one holds.

#include <cassert>
#include <cstdio>

#include "setforge/harness.hpp"

int main() {
    static_assert(true);
#ifdef NDEBUG
#error "this binary must be built with assertions enabled"
#endif
    const auto out = setforge::harness::run_balance_audit(0xa0d17, 2000, 200);
    std::printf("balance audit: calls=%llu violations=%llu historical-only=%llu\n",
                static_cast<unsigned long long>(out.calls),
                static_cast<unsigned long long>(out.violations),
                static_cast<unsigned long long>(out.historical_only));
    if (out.violations != 0) {
        std::printf("FAIL: a generated workload violated the precondition\n");
        return 1;
    }
    if (out.historical_only < 1) {
        std::printf("FAIL: no call separated the old and new preconditions\n");
        return 1;
    }
    return 0;
}
