#pragma once

#include "srrt/csw/context.hpp"
#include "srrt/runtime/process.hpp"
#include "srrt/runtime/trace.hpp"

#include <exception>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

namespace srrt {

using csw::BackendKind;

struct RuntimeOptions {
    BackendKind backend = BackendKind::fast;
    std::size_t stack_size = csw::kDefaultStackSize;
    std::size_t canary_len = csw::kDefaultCanaryLen;
    /// Check stack guards at every switch and when stacks are recycled.
    bool diagnostics = false;
    /// When set, every scheduler event is appended here.
    Trace* trace = nullptr;
    /// Live-process ceiling; 0 means limited only by memory.
    std::size_t max_processes = 0;
};

struct RunResult {
    /// Processes still blocked when nothing was left to run, in pid order.
    std::vector<Pid> blocked;
    std::uint64_t spawned = 0;
    std::uint64_t switches = 0;
};

class Semaphore;
class OperationQueue;
void reply(Invocation& inv, Value value);

/// Cooperative scheduler for one OS thread.
///
/// Processes run until they block, yield or finish. Wakeups append to the tail
/// of the ready queue; nothing preempts the running process. A finished
/// process switches to the bootstrap context, which reclaims it and dispatches
/// the next ready process. run() returns once the ready queue is empty;
/// processes blocked at that point stay blocked until the Runtime is destroyed
/// and are discarded without unwinding.
///
/// At most one Runtime may exist per thread at a time.
class Runtime {
public:
    explicit Runtime(RuntimeOptions options = {});
    ~Runtime();
    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    /// The Runtime alive on this thread, or nullptr.
    static Runtime* current() noexcept;
    /// Like current() but throws Error(invalid_state) when there is none.
    static Runtime& active();

    RunResult run();
    RunResult run(std::function<void()> main);

    /// Creates a ready process at the tail of the ready queue. Callable from a
    /// process or from the bootstrap. Throws Error(capacity) when the process
    /// ceiling is reached or a stack cannot be allocated.
    Pid spawn(std::function<void()> body);

    /// Blocks until `pid` has finished; returns at once if it already has.
    /// Throws Error(deadlock) on self-join and Error(not_found) for a pid that
    /// was never issued.
    void join(Pid pid);

    /// Moves the caller to the tail of the ready queue and runs the head; a
    /// no-op when nothing else is ready.
    void yield_now();

    /// Pid of the running process, 0 in the bootstrap.
    Pid self() const noexcept;
    ProcessState state(Pid pid) const;
    std::size_t live_processes() const noexcept { return live_.size(); }
    std::vector<Pid> ready_pids() const;
    /// Stack of a live process, nullptr otherwise.
    csw::Stack* stack_of(Pid pid) const;

    BackendKind backend() const noexcept { return options_.backend; }
    std::uint64_t switches() const noexcept { return switches_; }
    std::uint64_t spawned() const noexcept { return next_pid_ - 1; }
    /// Guard faults found on recycled stacks in diagnostic mode.
    std::size_t stack_faults() const noexcept { return stack_faults_; }

    /// Appends a user event from the running process (pid 0 from the bootstrap).
    void trace_user(std::int64_t tag, std::int64_t value);

private:
    friend class Semaphore;
    friend class OperationQueue;
    friend void reply(Invocation& inv, Value value);

    using Process = detail::Process;

    Process& running_process(const char* operation);
    void block_current(WaitKind kind, std::int64_t label);
    void wake(Process& p);
    void switch_from(Process& me);
    void emit(EventKind kind, Pid pid, std::int64_t a = 0, std::int64_t b = 0)
    {
        if (trace_ != nullptr) trace_->push_back(Event{kind, pid, a, b});
    }

    std::unique_ptr<Process> acquire_process();
    void reclaim_zombies();
    void finish(Process& p);
    static void process_entry(void* arg);

    RuntimeOptions options_;
    Trace* trace_;
    std::unique_ptr<csw::Context> boot_;
    Process* current_ = nullptr;
    detail::ProcessQueue ready_;
    std::unordered_map<Pid, std::unique_ptr<Process>> live_;
    std::vector<std::unique_ptr<Process>> zombies_;
    std::vector<std::unique_ptr<Process>> pool_;
    Pid next_pid_ = 1;
    std::uint64_t switches_ = 0;
    std::size_t stack_faults_ = 0;
    bool running_ = false;
    std::exception_ptr failure_;
};

// Shorthands for the thread's active runtime.
Pid spawn(std::function<void()> body);
void join(Pid pid);
void yield_now();
Pid self();

}  // namespace srrt
