#include "srrt/csw/context.hpp"

#include "fast_switch.hpp"
#include "srrt/error.hpp"

#include <ucontext.h>

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace srrt::csw {

struct Context::PortableState {
    ucontext_t uc;
};

namespace {

thread_local bool tl_diagnostics = false;
thread_local InjectedFaults tl_faults;

[[noreturn]] void fatal(const char* what)
{
    std::fprintf(stderr, "srrt: %s\n", what);
    std::abort();
}

}  // namespace

std::string_view to_string(BackendKind kind) noexcept
{
    return kind == BackendKind::fast ? "fast" : "portable";
}

BackendKind backend_from_string(std::string_view name)
{
    if (name == "fast") return BackendKind::fast;
    if (name == "portable") return BackendKind::portable;
    throw Error(Errc::invalid_argument, "unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(ContextStatus status) noexcept
{
    switch (status) {
    case ContextStatus::fresh: return "fresh";
    case ContextStatus::suspended: return "suspended";
    case ContextStatus::running: return "running";
    case ContextStatus::returned: return "returned";
    }
    return "?";
}

std::string_view to_string(StackStatus status) noexcept
{
    switch (status) {
    case StackStatus::ok: return "ok";
    case StackStatus::overflow: return "overflow";
    case StackStatus::underflow: return "underflow";
    }
    return "?";
}

void set_diagnostics(bool enabled) noexcept { tl_diagnostics = enabled; }
bool diagnostics_enabled() noexcept { return tl_diagnostics; }
void set_injected_faults(const InjectedFaults& faults) noexcept { tl_faults = faults; }
const InjectedFaults& injected_faults() noexcept { return tl_faults; }

Context::Context(BackendKind backend, Stack* stack) : backend_(backend), stack_(stack)
{
    if (stack_ != nullptr) {
        if (stack_->bound_) throw Error(Errc::conflict, "stack is already bound to a live context");
        stack_->bound_ = true;
    }
    if (backend_ == BackendKind::portable) portable_ = std::make_unique<PortableState>();
}

Context::~Context()
{
    if (stack_ != nullptr) stack_->bound_ = false;
}

void Context::run_entry(Context* self)
{
    try {
        self->entry_(self->arg_);
    } catch (...) {
        self->failure_ = std::current_exception();
    }

    Context* target = self->link_ != nullptr ? self->link_ : self->resumer_;
    if (target == nullptr) fatal("context entry returned with nowhere to go");
    self->status_ = tl_faults.drop_return_mark ? ContextStatus::suspended : ContextStatus::returned;
    target->status_ = ContextStatus::running;
    target->resumer_ = self;

    if (self->backend_ == BackendKind::fast)
        srrt_fast_switch(&self->sp_, target->sp_);
    else
        ::setcontext(&target->portable_->uc);
    fatal("returned context was resumed");
}

void Context::portable_entry(unsigned hi, unsigned lo)
{
    auto bits = (static_cast<std::uintptr_t>(hi) << 32) | static_cast<std::uintptr_t>(lo);
    run_entry(reinterpret_cast<Context*>(bits));
}

void Context::record_guard_check(Context& from)
{
    if (from.stack_ == nullptr || from.flagged_ != StackStatus::ok) return;
    if (!from.stack_->deep_guard_intact())
        from.flagged_ = StackStatus::overflow;
    else if (!from.stack_->shallow_guard_intact())
        from.flagged_ = StackStatus::underflow;
}

std::unique_ptr<Context> make_context(BackendKind backend, Stack& stack, EntryFn entry, void* arg)
{
    if (entry == nullptr) throw Error(Errc::invalid_argument, "context entry must not be null");
    std::unique_ptr<Context> ctx(new Context(backend, &stack));
    ctx->entry_ = entry;
    ctx->arg_ = arg;

    auto usable = stack.usable();
    if (backend == BackendKind::fast) {
        auto trampoline = [](void* self) { Context::run_entry(static_cast<Context*>(self)); };
        ctx->sp_ = detail::fast_prepare_frame(usable.data() + usable.size(),
                                              +trampoline, ctx.get());
    } else {
        ucontext_t& uc = ctx->portable_->uc;
        if (::getcontext(&uc) != 0)
            throw Error(Errc::environment, std::string("getcontext: ") + std::strerror(errno));
        uc.uc_stack.ss_sp = usable.data();
        uc.uc_stack.ss_size = usable.size();
        uc.uc_link = nullptr;
        auto bits = reinterpret_cast<std::uintptr_t>(ctx.get());
        ::makecontext(&uc, reinterpret_cast<void (*)()>(&Context::portable_entry), 2,
                      static_cast<unsigned>(bits >> 32), static_cast<unsigned>(bits & 0xFFFFFFFFu));
    }
    return ctx;
}

std::unique_ptr<Context> attach_thread(BackendKind backend)
{
    std::unique_ptr<Context> ctx(new Context(backend, nullptr));
    ctx->status_ = ContextStatus::running;
    return ctx;
}

void swap(Context& from, Context& to)
{
    if (&from == &to) throw Error(Errc::invalid_target, "cannot switch a context to itself");
    if (from.backend_ != to.backend_)
        throw Error(Errc::invalid_target, "cannot switch between backends");
    if (to.status_ == ContextStatus::running)
        throw Error(Errc::invalid_target, "target context is already running");
    if (to.status_ == ContextStatus::returned)
        throw Error(Errc::invalid_target, "target context has returned");
    if (from.status_ != ContextStatus::running)
        throw Error(Errc::invalid_state, "source context is not running");

    if (tl_diagnostics && !tl_faults.drop_canary_hook) Context::record_guard_check(from);

    from.status_ = ContextStatus::suspended;
    to.status_ = ContextStatus::running;
    to.resumer_ = &from;
    if (from.backend_ == BackendKind::fast)
        srrt_fast_switch(&from.sp_, to.sp_);
    else
        ::swapcontext(&from.portable_->uc, &to.portable_->uc);
}

StackStatus stack_check(const Context& ctx)
{
    if (ctx.stack() != nullptr && !ctx.stack()->deep_guard_intact()) return StackStatus::overflow;
    if (ctx.status() == ContextStatus::returned) return StackStatus::underflow;
    if (ctx.stack() != nullptr && !ctx.stack()->shallow_guard_intact()) return StackStatus::underflow;
    return StackStatus::ok;
}

}  // namespace srrt::csw
