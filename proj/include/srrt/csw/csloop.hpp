#pragma once

#include "srrt/csw/context.hpp"

#include <cstdint>

namespace srrt::csw {

/// One-way transfers count as one switch, so a ping-pong round trip is two.
struct SwitchStats {
    std::uint64_t total_switches = 0;
    double elapsed = 0.0;     // seconds
    double per_switch = 0.0;  // microseconds
};

/// Ping-pongs two contexts until at least `seconds` of wall-clock time has
/// passed. Throws Error(invalid_argument) when seconds < 1.
SwitchStats run_csloop(BackendKind backend, int seconds);

/// Same measurement bounded by a switch count instead of time.
SwitchStats run_csloop_switches(BackendKind backend, std::uint64_t round_trips);

}  // namespace srrt::csw
