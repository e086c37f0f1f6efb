#pragma once

#include "srrt/runtime/process.hpp"

#include <string>
#include <vector>

namespace srrt {

enum class EventKind : std::uint8_t { spawn, dispatch, block, wake, exit, user };

/// One scheduler event.
///   spawn     a = parent pid (0 for the bootstrap)
///   block     a = WaitKind, b = label of the object waited on
///   wake      a = WaitKind, b = label
///   user      a = caller-defined tag, b = caller-defined value
/// dispatch and exit carry only the pid.
struct Event {
    EventKind kind = EventKind::user;
    Pid pid = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

using Trace = std::vector<Event>;

std::string_view to_string(EventKind kind) noexcept;
std::string_view to_string(WaitKind kind) noexcept;
std::string format_event(const Event& e);
std::string format_trace(const Trace& trace);

}  // namespace srrt
