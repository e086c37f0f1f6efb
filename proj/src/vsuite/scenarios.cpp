#include "srrt/vsuite/vsuite.hpp"

#include "srrt/csw/cstest.hpp"
#include "srrt/error.hpp"
#include "srrt/runtime/resource.hpp"

#include <map>
#include <sstream>

namespace srrt::vsuite {

namespace {

const char* state_name(ProcessState s)
{
    switch (s) {
    case ProcessState::ready: return "ready";
    case ProcessState::running: return "running";
    case ProcessState::blocked: return "blocked";
    case ProcessState::dead: return "dead";
    }
    return "?";
}

// Three waiters queue on an empty semaphore and are released one V at a time.
std::string sem_fifo(BackendKind backend)
{
    std::ostringstream out;
    Runtime rt(RuntimeOptions{.backend = backend});
    rt.run([&] {
        Semaphore s(0);
        std::vector<Pid> workers;
        for (int i = 0; i < 3; ++i)
            workers.push_back(spawn([&, i] {
                out << "worker " << i << " waits\n";
                s.p();
                out << "worker " << i << " acquired\n";
            }));
        yield_now();
        out << "waiting " << s.waiting() << " count " << s.count() << "\n";
        for (int i = 0; i < 3; ++i) {
            out << "V " << i << "\n";
            s.v();
            yield_now();
        }
        for (Pid w : workers) join(w);
        out << "waiting " << s.waiting() << " count " << s.count() << "\n";
    });
    return out.str();
}

// A server doubles whatever two clients send it.
std::string rendezvous_echo(BackendKind backend)
{
    std::ostringstream out;
    Runtime rt(RuntimeOptions{.backend = backend});
    const RunResult result = rt.run([&] {
        OperationQueue echo;
        spawn([&] {
            for (int served = 0; served < 4; ++served) {
                Invocation& inv = echo.accept();
                out << "server accepts " << inv.payload << " from " << inv.caller << "\n";
                reply(inv, inv.payload * 2);
            }
            out << "server done\n";
        });
        std::vector<Pid> clients;
        for (Value base : {10, 20})
            clients.push_back(spawn([&, base] {
                for (Value k = 1; k <= 2; ++k) {
                    const Value got = echo.call(base + k);
                    out << "client " << self() << " sent " << base + k << " got " << got << "\n";
                }
            }));
        for (Pid c : clients) join(c);
    });
    out << "blocked at end " << result.blocked.size() << "\n";
    return out.str();
}

// The scheduler's own event trace for three processes that yield in turn.
std::string scheduler_order(BackendKind backend)
{
    Trace trace;
    Runtime rt(RuntimeOptions{.backend = backend, .trace = &trace});
    rt.run([] {
        for (int i = 0; i < 3; ++i)
            spawn([i] {
                for (int round = 0; round < 2; ++round) {
                    Runtime::active().trace_user(i, round);
                    yield_now();
                }
            });
    });
    return format_trace(trace);
}

// Sends never block; receives drain in FIFO order and block once empty.
std::string async_messages(BackendKind backend)
{
    std::ostringstream out;
    Runtime rt(RuntimeOptions{.backend = backend});
    const RunResult result = rt.run([&] {
        OperationQueue mailbox;
        for (Value v = 1; v <= 3; ++v) mailbox.send(v * 100);
        out << "pending " << mailbox.pending_messages() << "\n";
        spawn([&] {
            for (int i = 0; i < 5; ++i) {
                const Value v = mailbox.receive();
                out << "received " << v << "\n";
            }
            out << "unreachable\n";
        });
        yield_now();
        out << "receiver waiting " << mailbox.waiting() << "\n";
        mailbox.send(400);
        yield_now();
        out << "pending " << mailbox.pending_messages() << " waiting " << mailbox.waiting()
            << "\n";
    });
    out << "blocked at end";
    for (Pid p : result.blocked) out << " " << p;
    out << "\n";
    return out.str();
}

// Process states across spawn, wait and death, plus join on the dead.
std::string join_lifecycle(BackendKind backend)
{
    std::ostringstream out;
    Runtime rt(RuntimeOptions{.backend = backend});
    rt.run([&] {
        Runtime& r = Runtime::active();
        const Pid child = spawn([&] {
            out << "child " << self() << " running\n";
            yield_now();
            out << "child exits\n";
        });
        out << "child state " << state_name(r.state(child)) << "\n";
        join(child);
        out << "child state " << state_name(r.state(child)) << "\n";
        join(child);
        out << "second join returns at once\n";
        try {
            join(self());
        } catch (const Error& e) {
            out << "self join: " << to_string(e.code()) << "\n";
        }
    });
    return out.str();
}

// Procedure calls into a resource with and without a fresh process.
std::string interresource_calls(BackendKind backend)
{
    std::ostringstream out;
    Runtime rt(RuntimeOptions{.backend = backend});
    const RunResult result = rt.run([&] {
        Resource r("arith");
        r.define_proc("square", [](Value v) { return v * v; });
        r.define_op("negate", [](Value v) { return -v; });
        Runtime& rt_ = Runtime::active();
        for (Value v = 1; v <= 3; ++v) {
            out << "square(" << v << ") = " << r.call_proc_new_process("square", v)
                << " live " << rt_.live_processes() << "\n";
            out << "negate(" << v << ") = " << r.call_proc_served("negate", v) << " live "
                << rt_.live_processes() << "\n";
        }
    });
    out << "processes spawned " << result.spawned << "\n";
    return out.str();
}

std::string cstest_summary(BackendKind backend)
{
    return csw::format_summary(csw::run_cstest(backend));
}

std::map<std::string, Scenario, std::less<>>& registry()
{
    static std::map<std::string, Scenario, std::less<>> scenarios = {
        {"async_messages", async_messages},
        {"cstest_summary", cstest_summary},
        {"interresource_calls", interresource_calls},
        {"join_lifecycle", join_lifecycle},
        {"rendezvous_echo", rendezvous_echo},
        {"scheduler_order", scheduler_order},
        {"sem_fifo", sem_fifo},
    };
    return scenarios;
}

}  // namespace

void register_scenario(std::string name, Scenario scenario)
{
    if (name.empty() || !scenario)
        throw Error(Errc::invalid_argument, "a scenario needs a name and a body");
    registry()[std::move(name)] = std::move(scenario);
}

std::vector<std::string> scenario_names()
{
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    return names;
}

bool has_scenario(std::string_view name) { return registry().find(name) != registry().end(); }

std::string run_scenario(std::string_view name, BackendKind backend)
{
    const auto it = registry().find(name);
    if (it == registry().end())
        throw Error(Errc::not_found, "unknown scenario '" + std::string(name) + "'");
    return it->second(backend);
}

}  // namespace srrt::vsuite
