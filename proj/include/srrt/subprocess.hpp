#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

namespace srrt {

/// What happened to a forked child.
struct ChildOutcome {
    int exit_code = -1;    // valid when the child exited normally
    int term_signal = 0;   // nonzero when the child was killed by a signal
    bool timed_out = false;
    std::string output;    // everything the child wrote to its output descriptor

    bool exited_ok() const { return !timed_out && term_signal == 0 && exit_code == 0; }
    std::string describe() const;
};

/// Runs `body` in a forked child. The child receives a descriptor connected to
/// the parent's capture pipe and its return value becomes the exit status.
/// Crashes and hangs stay inside the child.
ChildOutcome run_in_child(const std::function<int(int out_fd)>& body,
                          std::chrono::milliseconds timeout);

/// Runs an external command with its standard output captured.
ChildOutcome run_command(const std::vector<std::string>& argv,
                         std::chrono::milliseconds timeout);

/// Writes the whole buffer to a descriptor, retrying on short writes.
void write_all(int fd, std::string_view data);

}  // namespace srrt
