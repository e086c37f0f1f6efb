#pragma once

#include "srrt/csw/stack.hpp"

#include <exception>
#include <memory>
#include <string_view>

namespace srrt::csw {

enum class BackendKind { fast, portable };

/// fast: callee-saved registers and the stack pointer, switched in user space.
/// portable: the C library's full-state getcontext/makecontext/swapcontext,
/// which also saves and restores the signal mask through the kernel.
std::string_view to_string(BackendKind kind) noexcept;
BackendKind backend_from_string(std::string_view name);

enum class ContextStatus { fresh, suspended, running, returned };
enum class StackStatus { ok, overflow, underflow };

std::string_view to_string(ContextStatus status) noexcept;
std::string_view to_string(StackStatus status) noexcept;

using EntryFn = void (*)(void* arg);

/// A suspended (or running) execution bound to its own stack.
///
/// Contexts are created by make_context() or attach_thread() and never move.
/// When an entry procedure returns, the context is marked returned and control
/// transfers to its link (set_link), or to whichever context last switched
/// into it when no link is set. Exceptions escaping the entry are captured in
/// failure() instead of unwinding off the stack.
class Context {
public:
    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;
    ~Context();

    BackendKind backend() const noexcept { return backend_; }
    ContextStatus status() const noexcept { return status_; }

    /// nullptr for a thread's root context.
    Stack* stack() const noexcept { return stack_; }

    void set_link(Context* target) noexcept { link_ = target; }
    Context* link() const noexcept { return link_; }

    /// First guard fault caught by a switch-time check (diagnostic mode);
    /// ok until one is caught.
    StackStatus flagged() const noexcept { return flagged_; }

    std::exception_ptr failure() const noexcept { return failure_; }

private:
    struct PortableState;

    Context(BackendKind backend, Stack* stack);

    friend std::unique_ptr<Context> make_context(BackendKind, Stack&, EntryFn, void*);
    friend std::unique_ptr<Context> attach_thread(BackendKind);
    friend void swap(Context& from, Context& to);

    [[noreturn]] static void run_entry(Context* self);
    static void portable_entry(unsigned hi, unsigned lo);
    static void record_guard_check(Context& from);

    BackendKind backend_;
    ContextStatus status_ = ContextStatus::fresh;
    StackStatus flagged_ = StackStatus::ok;
    Stack* stack_;
    Context* link_ = nullptr;
    Context* resumer_ = nullptr;
    EntryFn entry_ = nullptr;
    void* arg_ = nullptr;
    std::exception_ptr failure_;
    void* sp_ = nullptr;                     // fast backend resume point
    std::unique_ptr<PortableState> portable_;  // portable backend resume state
};

/// Prepares a fresh context that will run entry(arg) on `stack` when first
/// switched into. Throws Error(conflict) if the stack is already bound.
std::unique_ptr<Context> make_context(BackendKind backend, Stack& stack, EntryFn entry, void* arg);

/// A running context standing for the calling thread's own stack. It is the
/// usual `from` of the first swap and the natural link for returning entries.
std::unique_ptr<Context> attach_thread(BackendKind backend);

/// Suspends `from` and resumes `to`. Returns when something later switches
/// back into `from`. Throws Error(invalid_target) when `to` is `from`, is
/// running or has returned, or belongs to the other backend, and
/// Error(invalid_state) when `from` is not the running context.
void swap(Context& from, Context& to);

/// Guard inspection. Overflow when the deep guard is corrupt (takes
/// precedence); underflow when the entry returned or the shallow guard is
/// corrupt; ok otherwise.
StackStatus stack_check(const Context& ctx);

/// Diagnostic mode: every swap checks the outgoing context's guards and
/// records the outcome in Context::flagged(). Per thread, off by default.
void set_diagnostics(bool enabled) noexcept;
bool diagnostics_enabled() noexcept;

class ScopedDiagnostics {
public:
    explicit ScopedDiagnostics(bool enabled = true) : previous_(diagnostics_enabled())
    {
        set_diagnostics(enabled);
    }
    ~ScopedDiagnostics() { set_diagnostics(previous_); }
    ScopedDiagnostics(const ScopedDiagnostics&) = delete;
    ScopedDiagnostics& operator=(const ScopedDiagnostics&) = delete;

private:
    bool previous_;
};

/// Deliberate defects used to prove that the harness checks can fail.
struct InjectedFaults {
    bool drop_canary_hook = false;  // diagnostic swaps skip the guard check
    bool drop_return_mark = false;  // returning entries are not marked returned
};

void set_injected_faults(const InjectedFaults& faults) noexcept;
const InjectedFaults& injected_faults() noexcept;

class ScopedFaults {
public:
    explicit ScopedFaults(const InjectedFaults& faults) : previous_(injected_faults())
    {
        set_injected_faults(faults);
    }
    ~ScopedFaults() { set_injected_faults(previous_); }
    ScopedFaults(const ScopedFaults&) = delete;
    ScopedFaults& operator=(const ScopedFaults&) = delete;

private:
    InjectedFaults previous_;
};

}  // namespace srrt::csw
