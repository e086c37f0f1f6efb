#include "srrt/runtime/runtime.hpp"

#include "srrt/error.hpp"

#include <algorithm>
#include <sstream>

namespace srrt {

namespace {

thread_local Runtime* tl_runtime = nullptr;
constexpr std::size_t kPoolLimit = 1024;

}  // namespace

std::string_view to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::spawn: return "spawn";
    case EventKind::dispatch: return "dispatch";
    case EventKind::block: return "block";
    case EventKind::wake: return "wake";
    case EventKind::exit: return "exit";
    case EventKind::user: return "user";
    }
    return "?";
}

std::string_view to_string(WaitKind kind) noexcept
{
    switch (kind) {
    case WaitKind::none: return "none";
    case WaitKind::semaphore: return "sem";
    case WaitKind::receive: return "receive";
    case WaitKind::accept: return "accept";
    case WaitKind::reply: return "reply";
    case WaitKind::join: return "join";
    }
    return "?";
}

std::string format_event(const Event& e)
{
    std::ostringstream os;
    os << to_string(e.kind) << ' ' << e.pid;
    switch (e.kind) {
    case EventKind::spawn: os << " parent=" << e.a; break;
    case EventKind::block:
    case EventKind::wake:
        os << ' ' << to_string(static_cast<WaitKind>(e.a)) << '#' << e.b;
        break;
    case EventKind::user: os << " tag=" << e.a << " value=" << e.b; break;
    default: break;
    }
    return os.str();
}

std::string format_trace(const Trace& trace)
{
    std::string out;
    for (const auto& e : trace) {
        out += format_event(e);
        out += '\n';
    }
    return out;
}

Runtime::Runtime(RuntimeOptions options) : options_(options), trace_(options.trace)
{
    if (tl_runtime != nullptr)
        throw Error(Errc::conflict, "a runtime already exists on this thread");
    csw::validate_stack_geometry(options_.stack_size, options_.canary_len);
    boot_ = csw::attach_thread(options_.backend);
    tl_runtime = this;
}

Runtime::~Runtime()
{
    // Blocked processes are abandoned where they stand.
    live_.clear();
    zombies_.clear();
    pool_.clear();
    tl_runtime = nullptr;
}

Runtime* Runtime::current() noexcept { return tl_runtime; }

Runtime& Runtime::active()
{
    if (tl_runtime == nullptr) throw Error(Errc::invalid_state, "no runtime on this thread");
    return *tl_runtime;
}

Pid Runtime::self() const noexcept { return current_ != nullptr ? current_->pid : 0; }

ProcessState Runtime::state(Pid pid) const
{
    if (pid == 0 || pid >= next_pid_) throw Error(Errc::not_found, "unknown pid " + std::to_string(pid));
    auto it = live_.find(pid);
    return it == live_.end() ? ProcessState::dead : it->second->state;
}

csw::Stack* Runtime::stack_of(Pid pid) const
{
    auto it = live_.find(pid);
    return it == live_.end() ? nullptr : it->second->stack.get();
}

std::vector<Pid> Runtime::ready_pids() const
{
    std::vector<Pid> pids;
    ready_.for_each([&](const Process& p) { pids.push_back(p.pid); });
    return pids;
}

void Runtime::trace_user(std::int64_t tag, std::int64_t value)
{
    emit(EventKind::user, self(), tag, value);
}

std::unique_ptr<detail::Process> Runtime::acquire_process()
{
    if (!pool_.empty()) {
        auto p = std::move(pool_.back());
        pool_.pop_back();
        return p;
    }
    auto p = std::make_unique<Process>();
    p->stack = csw::alloc_stack(options_.stack_size, options_.canary_len);
    return p;
}

Pid Runtime::spawn(std::function<void()> body)
{
    if (!body) throw Error(Errc::invalid_argument, "process body must be callable");
    if (options_.max_processes != 0 && live_.size() >= options_.max_processes)
        throw Error(Errc::capacity, "process limit of " + std::to_string(options_.max_processes) +
                                        " reached");
    auto owned = acquire_process();
    Process& p = *owned;
    p.ctx = csw::make_context(options_.backend, *p.stack, &Runtime::process_entry, &p);
    p.ctx->set_link(boot_.get());
    p.pid = next_pid_++;
    p.state = ProcessState::ready;
    p.body = std::move(body);
    p.waiting_on = WaitKind::none;
    p.invocation = nullptr;
    live_.emplace(p.pid, std::move(owned));
    ready_.push_back(&p);
    emit(EventKind::spawn, p.pid, static_cast<std::int64_t>(self()));
    return p.pid;
}

void Runtime::process_entry(void* arg)
{
    auto& p = *static_cast<Process*>(arg);
    Runtime& rt = *tl_runtime;
    try {
        p.body();
    } catch (...) {
        if (!rt.failure_) rt.failure_ = std::current_exception();
    }
    rt.finish(p);
}

void Runtime::finish(Process& p)
{
    p.state = ProcessState::dead;
    emit(EventKind::exit, p.pid);
    while (Process* waiter = p.join_waiters.pop_front()) wake(*waiter);
    auto it = live_.find(p.pid);
    zombies_.push_back(std::move(it->second));
    live_.erase(it);
    current_ = nullptr;
    ++switches_;
    // Returning from the entry hands control to the bootstrap through the link.
}

void Runtime::reclaim_zombies()
{
    for (auto& z : zombies_) {
        z->ctx.reset();
        z->body = nullptr;
        if (options_.diagnostics &&
            (!z->stack->deep_guard_intact() || !z->stack->shallow_guard_intact())) {
            ++stack_faults_;
            z->stack->rearm();
        }
        if (pool_.size() < kPoolLimit) pool_.push_back(std::move(z));
    }
    zombies_.clear();
}

RunResult Runtime::run(std::function<void()> main)
{
    spawn(std::move(main));
    return run();
}

RunResult Runtime::run()
{
    if (running_) throw Error(Errc::invalid_state, "runtime is already running");
    running_ = true;
    csw::ScopedDiagnostics diagnostics(options_.diagnostics);
    for (;;) {
        reclaim_zombies();
        Process* next = ready_.pop_front();
        if (next == nullptr) break;
        next->state = ProcessState::running;
        current_ = next;
        emit(EventKind::dispatch, next->pid);
        ++switches_;
        csw::swap(*boot_, *next->ctx);
    }
    current_ = nullptr;
    running_ = false;

    RunResult result;
    for (const auto& [pid, p] : live_)
        if (p->state == ProcessState::blocked) result.blocked.push_back(pid);
    std::sort(result.blocked.begin(), result.blocked.end());
    result.spawned = spawned();
    result.switches = switches_;

    if (failure_) {
        auto failure = failure_;
        failure_ = nullptr;
        std::rethrow_exception(failure);
    }
    return result;
}

detail::Process& Runtime::running_process(const char* operation)
{
    if (current_ == nullptr)
        throw Error(Errc::invalid_state, std::string(operation) + " must run inside a process");
    return *current_;
}

void Runtime::switch_from(Process& me)
{
    Process* next = ready_.pop_front();
    csw::Context* target;
    if (next != nullptr) {
        next->state = ProcessState::running;
        current_ = next;
        emit(EventKind::dispatch, next->pid);
        target = next->ctx.get();
    } else {
        current_ = nullptr;
        target = boot_.get();
    }
    ++switches_;
    csw::swap(*me.ctx, *target);
}

void Runtime::block_current(WaitKind kind, std::int64_t label)
{
    Process& me = *current_;
    me.state = ProcessState::blocked;
    me.waiting_on = kind;
    me.wait_label = label;
    emit(EventKind::block, me.pid, static_cast<std::int64_t>(kind), label);
    switch_from(me);
    me.waiting_on = WaitKind::none;
}

void Runtime::wake(Process& p)
{
    p.state = ProcessState::ready;
    emit(EventKind::wake, p.pid, static_cast<std::int64_t>(p.waiting_on), p.wait_label);
    ready_.push_back(&p);
}

void Runtime::yield_now()
{
    Process& me = running_process("yield");
    if (ready_.empty()) return;
    me.state = ProcessState::ready;
    ready_.push_back(&me);
    switch_from(me);
}

void Runtime::join(Pid pid)
{
    Process& me = running_process("join");
    if (pid == me.pid) throw Error(Errc::deadlock, "process " + std::to_string(pid) + " joined itself");
    if (pid == 0 || pid >= next_pid_) throw Error(Errc::not_found, "unknown pid " + std::to_string(pid));
    auto it = live_.find(pid);
    if (it == live_.end() || it->second->state == ProcessState::dead) return;
    it->second->join_waiters.push_back(&me);
    block_current(WaitKind::join, static_cast<std::int64_t>(pid));
}

Pid spawn(std::function<void()> body) { return Runtime::active().spawn(std::move(body)); }
void join(Pid pid) { Runtime::active().join(pid); }
void yield_now() { Runtime::active().yield_now(); }
Pid self() { return Runtime::active().self(); }

}  // namespace srrt
