#include "srrt/csw/cstest.hpp"

#include "srrt/error.hpp"
#include "srrt/subprocess.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>

namespace srrt::csw {

namespace {

constexpr std::size_t kOverflowCanary = 4096;
constexpr std::uintptr_t kDigBelowUsable = 2048;
constexpr auto kSubtestTimeout = std::chrono::seconds(10);

struct Dig {
    Context* self = nullptr;
    Context* home = nullptr;
    std::uintptr_t stop_below = 0;
    volatile unsigned sink = 0;
};

// Each frame scribbles over its own locals; recursion stops once a frame lies
// inside the deep guard, so the guard is overwritten by genuine stack use.
[[gnu::noinline]] void dig(Dig& d, unsigned depth)
{
    volatile unsigned char pad[128];
    for (unsigned i = 0; i < sizeof pad; ++i) pad[i] = static_cast<unsigned char>(depth);
    if (reinterpret_cast<std::uintptr_t>(&pad[0]) > d.stop_below)
        dig(d, depth + 1);
    else
        swap(*d.self, *d.home);
    d.sink = d.sink + pad[depth % sizeof pad];
}

void dig_entry(void* arg) { dig(*static_cast<Dig*>(arg), 0); }

void noop_entry(void*) {}

bool check_overflow(BackendKind backend, std::string& detail)
{
    Stack stack(kDefaultStackSize, kOverflowCanary);
    auto home = attach_thread(backend);
    Dig d;
    auto ctx = make_context(backend, stack, &dig_entry, &d);
    d.self = ctx.get();
    d.home = home.get();
    d.stop_below = reinterpret_cast<std::uintptr_t>(stack.usable().data()) - kDigBelowUsable;

    if (stack_check(*ctx) != StackStatus::ok) {
        detail = "overflow: fresh context did not check ok";
        return false;
    }
    StackStatus at_switch;
    {
        ScopedDiagnostics diagnostics;
        swap(*home, *ctx);
        at_switch = ctx->flagged();
    }
    StackStatus on_demand = stack_check(*ctx);
    detail = "overflow: switch-time check " + std::string(to_string(at_switch)) +
             ", on-demand check " + std::string(to_string(on_demand));
    return at_switch == StackStatus::overflow && on_demand == StackStatus::overflow;
}

bool check_underflow(BackendKind backend, std::string& detail)
{
    auto stack = alloc_stack();
    auto home = attach_thread(backend);
    auto ctx = make_context(backend, *stack, &noop_entry, nullptr);
    ctx->set_link(home.get());
    swap(*home, *ctx);
    StackStatus status = stack_check(*ctx);
    detail = "underflow: entry fell off its end, context " + std::string(to_string(ctx->status())) +
             ", check " + std::string(to_string(status));
    return ctx->status() == ContextStatus::returned && status == StackStatus::underflow;
}

bool check_order(BackendKind backend, const CstestOptions& options, std::string& detail)
{
    auto trace = round_robin_trace(backend, options.contexts, options.rounds, options.misroute_ring);
    const std::size_t expected_len =
        static_cast<std::size_t>(options.contexts) * static_cast<std::size_t>(options.rounds);
    std::size_t mismatch = trace.size();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i >= expected_len || trace[i] != static_cast<int>(i % options.contexts)) {
            mismatch = i;
            break;
        }
    }
    std::ostringstream os;
    os << "switch order: " << options.contexts << " contexts x " << options.rounds << " rounds, ";
    if (mismatch == trace.size() && trace.size() == expected_len) {
        os << trace.size() << " visits in ring order";
        detail = os.str();
        return true;
    }
    if (mismatch < trace.size())
        os << "first out-of-order visit at position " << mismatch << " (context " << trace[mismatch]
           << ", expected " << mismatch % options.contexts << ")";
    else
        os << "trace has " << trace.size() << " visits, expected " << expected_len;
    detail = os.str();
    return false;
}

using Subtest = std::function<bool(std::string&)>;

bool run_subtest(const Subtest& test, bool isolate, const char* name, std::string& detail)
{
    if (!isolate) {
        try {
            return test(detail);
        } catch (const std::exception& e) {
            detail = std::string(name) + ": raised " + e.what();
            return false;
        }
    }
    auto outcome = run_in_child(
        [&](int fd) {
            std::string msg;
            bool ok = false;
            try {
                ok = test(msg);
            } catch (const std::exception& e) {
                msg = std::string(name) + ": raised " + e.what();
            }
            write_all(fd, msg);
            return ok ? 0 : 1;
        },
        kSubtestTimeout);
    detail = outcome.output;
    if (outcome.exit_code == 0 || outcome.exit_code == 1) return outcome.exit_code == 0;
    detail = std::string(name) + ": sub-test crashed, " + outcome.describe();
    return false;
}

struct Ring {
    std::vector<std::unique_ptr<Context>> members;
    Context* home = nullptr;
    int rounds = 0;
    bool misroute = false;
    std::vector<int>* trace = nullptr;
};

struct Member {
    Ring* ring;
    int id;
    bool done = false;
};

void ring_entry(void* arg)
{
    auto& m = *static_cast<Member*>(arg);
    Ring& ring = *m.ring;
    const int n = static_cast<int>(ring.members.size());
    Context& self = *ring.members[static_cast<std::size_t>(m.id)];
    for (int round = 0; round < ring.rounds; ++round) {
        ring.trace->push_back(m.id);
        Context* next;
        if (m.id + 1 < n) {
            int to = m.id + 1;
            if (ring.misroute && round == 0 && m.id == 0 && n > 2) to = 2;
            next = ring.members[static_cast<std::size_t>(to)].get();
        } else if (n > 1 && round + 1 < ring.rounds) {
            next = ring.members[0].get();
        } else {
            next = ring.home;
        }
        swap(self, *next);
    }
    m.done = true;
}

}  // namespace

std::vector<int> round_robin_trace(BackendKind backend, int contexts, int rounds, bool misroute)
{
    if (contexts < 1 || rounds < 1)
        throw Error(Errc::invalid_argument, "ring needs at least one context and one round");
    std::vector<int> trace;
    trace.reserve(static_cast<std::size_t>(contexts) * static_cast<std::size_t>(rounds));

    std::vector<std::unique_ptr<Stack>> stacks;
    std::vector<Member> members(static_cast<std::size_t>(contexts));
    auto home = attach_thread(backend);
    Ring ring;
    ring.home = home.get();
    ring.rounds = rounds;
    ring.misroute = misroute;
    ring.trace = &trace;
    for (int i = 0; i < contexts; ++i) {
        stacks.push_back(alloc_stack());
        members[static_cast<std::size_t>(i)] = Member{&ring, i, false};
        ring.members.push_back(
            make_context(backend, *stacks.back(), &ring_entry, &members[static_cast<std::size_t>(i)]));
        ring.members.back()->set_link(home.get());
    }

    swap(*home, *ring.members[0]);
    // The last member hands back after the final lap; let every member leave its loop.
    for (std::size_t i = 0; i < members.size(); ++i)
        while (!members[i].done) swap(*home, *ring.members[i]);
    return trace;
}

CswTestReport run_cstest(BackendKind backend, const CstestOptions& options)
{
    if (options.contexts < 1 || options.rounds < 1)
        throw Error(Errc::invalid_argument, "cstest needs at least one context and one round");
    ScopedFaults faults(options.faults);
    CswTestReport report;
    std::string detail;

    report.overflow_detected = run_subtest(
        [&](std::string& d) { return check_overflow(backend, d); }, options.isolate, "overflow",
        detail);
    report.detail.push_back(detail);

    report.underflow_detected = run_subtest(
        [&](std::string& d) { return check_underflow(backend, d); }, options.isolate, "underflow",
        detail);
    report.detail.push_back(detail);

    report.switch_order_ok = run_subtest(
        [&](std::string& d) { return check_order(backend, options, d); }, options.isolate,
        "switch order", detail);
    report.detail.push_back(detail);
    return report;
}

std::string format_summary(const CswTestReport& report)
{
    auto verdict = [](bool ok) { return ok ? "ok\n" : "FAILED\n"; };
    return std::string("stack overflow detection: ") + verdict(report.overflow_detected) +
           "stack underflow detection: " + verdict(report.underflow_detected) +
           "context switch order: " + verdict(report.switch_order_ok);
}

}  // namespace srrt::csw
