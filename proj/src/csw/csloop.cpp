#include "srrt/csw/csloop.hpp"

#include "srrt/error.hpp"

#include <chrono>

namespace srrt::csw {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::uint64_t kBatch = 1024;  // round trips between clock reads

struct PingPong {
    Context* home = nullptr;
    Context* peer = nullptr;
};

void bounce(void* arg)
{
    auto* pp = static_cast<PingPong*>(arg);
    for (;;) swap(*pp->peer, *pp->home);
}

template <typename Done>
SwitchStats ping_pong(BackendKind backend, Done done)
{
    auto stack = alloc_stack();
    auto home = attach_thread(backend);
    PingPong pp;
    auto peer = make_context(backend, *stack, &bounce, &pp);
    pp.home = home.get();
    pp.peer = peer.get();

    // The first entry into the peer is setup, not measured.
    swap(*home, *peer);

    std::uint64_t trips = 0;
    const auto start = Clock::now();
    auto now = start;
    do {
        for (std::uint64_t i = 0; i < kBatch; ++i) swap(*home, *peer);
        trips += kBatch;
        now = Clock::now();
    } while (!done(trips, now - start));

    SwitchStats stats;
    stats.total_switches = 2 * trips;
    stats.elapsed = std::chrono::duration<double>(now - start).count();
    stats.per_switch = stats.elapsed * 1e6 / static_cast<double>(stats.total_switches);
    return stats;
}

}  // namespace

SwitchStats run_csloop(BackendKind backend, int seconds)
{
    if (seconds < 1)
        throw Error(Errc::invalid_argument, "csloop needs a positive number of seconds");
    const auto budget = std::chrono::seconds(seconds);
    return ping_pong(backend, [budget](std::uint64_t, Clock::duration elapsed) {
        return elapsed >= budget;
    });
}

SwitchStats run_csloop_switches(BackendKind backend, std::uint64_t round_trips)
{
    if (round_trips == 0) throw Error(Errc::invalid_argument, "csloop needs at least one round trip");
    return ping_pong(backend, [round_trips](std::uint64_t trips, Clock::duration) {
        return trips >= round_trips;
    });
}

}  // namespace srrt::csw
