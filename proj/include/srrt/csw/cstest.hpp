#pragma once

#include "srrt/csw/context.hpp"

#include <string>
#include <vector>

namespace srrt::csw {

struct CswTestReport {
    bool overflow_detected = false;
    bool underflow_detected = false;
    bool switch_order_ok = false;
    std::vector<std::string> detail;

    bool passed() const { return overflow_detected && underflow_detected && switch_order_ok; }
};

struct CstestOptions {
    int contexts = 10;
    int rounds = 1000;
    /// Run each sub-test in a forked child so a crash is reported, not fatal.
    bool isolate = true;
    InjectedFaults faults;
    /// Routes the first ring switch past one context, breaking the order check.
    bool misroute_ring = false;
};

/// Context-switch self test: a seeded stack overflow caught by the switch-time
/// guard check, an entry falling off its end caught as underflow, and a ring
/// of contexts whose visiting order must be exact.
CswTestReport run_cstest(BackendKind backend, const CstestOptions& options = {});

/// Three lines, one per check, each ending in "ok" or "FAILED".
std::string format_summary(const CswTestReport& report);

/// Ids appended by `contexts` contexts passing control around a ring for
/// `rounds` laps. A correct switch yields 0..contexts-1 repeated `rounds` times.
std::vector<int> round_robin_trace(BackendKind backend, int contexts, int rounds,
                                   bool misroute = false);

}  // namespace srrt::csw
