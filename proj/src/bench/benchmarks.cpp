#include "srrt/bench/bench.hpp"

#include "srrt/error.hpp"
#include "srrt/runtime/resource.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <set>
#include <string>

namespace srrt::bench {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps a value alive without emitting any instruction for it.
template <typename T>
inline void do_not_optimize(const T& value)
{
    asm volatile("" : : "r,m"(value) : "memory");
}

// Stand-in for a compiled local procedure call: the compiler may not inline
// or specialise it, so every iteration pays a real call and return.
[[gnu::noipa]] Value local_proc(Value x) { return x + 1; }

constexpr std::array<std::string_view, 12> kNames = {
    "loop control overhead",
    "local call, optimised",
    "interresource call, no new process",
    "interresource call, new process",
    "process create/destroy",
    "semaphore P only",
    "semaphore V only",
    "semaphore pair",
    "semaphore requiring context switch",
    "asynchronous send/receive",
    "message passing requiring context switch",
    "rendezvous",
};

void require_monotonic_clock()
{
    timespec res{};
    if (!Clock::is_steady || clock_getres(CLOCK_MONOTONIC, &res) != 0)
        throw Error(Errc::environment, "no monotonic clock is available");
}

// One row's workload. prepare() runs untimed before each trial; run(n)
// performs the trial and returns how many operations it timed.
struct Kernel {
    std::function<void(std::uint64_t)> prepare = [](std::uint64_t) {};
    std::function<std::uint64_t(std::uint64_t)> run;
};

struct Fixtures {
    Resource resource{"bench"};
    Semaphore a;
    Semaphore b;
    OperationQueue q1{1};
    OperationQueue q2{2};
    std::unique_ptr<Semaphore> counted;
};

std::uint64_t empty_loop(std::uint64_t n)
{
    for (std::uint64_t i = 0; i < n; ++i) do_not_optimize(i);
    return n;
}

Kernel make_kernel(BenchmarkId id, Fixtures& fx)
{
    Kernel k;
    switch (id) {
    case BenchmarkId::loop_control_overhead:
        k.run = empty_loop;
        break;
    case BenchmarkId::local_call_optimised:
        k.run = [](std::uint64_t n) {
            Value x = 0;
            for (std::uint64_t i = 0; i < n; ++i) x = local_proc(x);
            do_not_optimize(x);
            return n;
        };
        break;
    case BenchmarkId::interresource_call_no_new_process:
        fx.resource.define_op("inc", [](Value v) { return v + 1; });
        k.run = [&fx](std::uint64_t n) {
            Value x = 0;
            for (std::uint64_t i = 0; i < n; ++i) x = fx.resource.call_proc_served("inc", x);
            do_not_optimize(x);
            return n;
        };
        break;
    case BenchmarkId::interresource_call_new_process:
        fx.resource.define_proc("inc", [](Value v) { return v + 1; });
        k.run = [&fx](std::uint64_t n) {
            Value x = 0;
            for (std::uint64_t i = 0; i < n; ++i)
                x = fx.resource.call_proc_new_process("inc", x);
            do_not_optimize(x);
            return n;
        };
        break;
    case BenchmarkId::process_create_destroy:
        k.run = [](std::uint64_t n) {
            for (std::uint64_t i = 0; i < n; ++i) join(spawn([] {}));
            return n;
        };
        break;
    case BenchmarkId::semaphore_p_only:
        k.prepare = [&fx](std::uint64_t n) { fx.counted = std::make_unique<Semaphore>(n); };
        k.run = [&fx](std::uint64_t n) {
            Semaphore& s = *fx.counted;
            for (std::uint64_t i = 0; i < n; ++i) s.p();
            return n;
        };
        break;
    case BenchmarkId::semaphore_v_only:
        k.prepare = [&fx](std::uint64_t) { fx.counted = std::make_unique<Semaphore>(0); };
        k.run = [&fx](std::uint64_t n) {
            Semaphore& s = *fx.counted;
            for (std::uint64_t i = 0; i < n; ++i) s.v();
            return n;
        };
        break;
    case BenchmarkId::semaphore_pair:
        k.run = [&fx](std::uint64_t n) {
            for (std::uint64_t i = 0; i < n; ++i) {
                fx.a.v();
                fx.a.p();
            }
            return n;
        };
        break;
    case BenchmarkId::semaphore_context_switch:
        // Each side blocks in P until the other side's V, so every P/V
        // crossing hands the processor over once.
        k.prepare = [&fx](std::uint64_t n) {
            spawn([&fx, trips = n / 2] {
                for (std::uint64_t i = 0; i < trips; ++i) {
                    fx.a.p();
                    fx.b.v();
                }
            });
        };
        k.run = [&fx](std::uint64_t n) {
            const std::uint64_t trips = n / 2;
            for (std::uint64_t i = 0; i < trips; ++i) {
                fx.a.v();
                fx.b.p();
            }
            return 2 * trips;
        };
        break;
    case BenchmarkId::async_send_receive:
        k.run = [&fx](std::uint64_t n) {
            Value x = 0;
            for (std::uint64_t i = 0; i < n; ++i) {
                fx.q1.send(static_cast<Value>(i));
                x += fx.q1.receive();
            }
            do_not_optimize(x);
            return n;
        };
        break;
    case BenchmarkId::message_context_switch:
        k.prepare = [&fx](std::uint64_t n) {
            spawn([&fx, trips = n / 2] {
                for (std::uint64_t i = 0; i < trips; ++i) fx.q2.send(fx.q1.receive());
            });
        };
        k.run = [&fx](std::uint64_t n) {
            const std::uint64_t trips = n / 2;
            Value x = 0;
            for (std::uint64_t i = 0; i < trips; ++i) {
                fx.q1.send(static_cast<Value>(i));
                x += fx.q2.receive();
            }
            do_not_optimize(x);
            return 2 * trips;
        };
        break;
    case BenchmarkId::rendezvous:
        // One long-lived server; it is still parked in accept when the
        // runtime shuts down, which discards it.
        spawn([&fx] {
            for (;;) {
                Invocation& inv = fx.q1.accept();
                reply(inv, inv.payload + 1);
            }
        });
        k.run = [&fx](std::uint64_t n) {
            Value x = 0;
            for (std::uint64_t i = 0; i < n; ++i) x = fx.q1.call(x);
            do_not_optimize(x);
            return n;
        };
        break;
    }
    return k;
}

// One timed trial in a fresh runtime, preceded by the configured warmups.
// Returns microseconds per operation.
double time_one_trial(BenchmarkId id, BackendKind backend, const BenchConfig& cfg)
{
    const std::uint64_t n = iterations_for(id, cfg);
    double result = 0.0;

    Runtime rt(RuntimeOptions{.backend = backend});
    rt.run([&] {
        Fixtures fx;
        Kernel k = make_kernel(id, fx);
        for (std::size_t t = 0; t <= cfg.warmup_trials; ++t) {
            k.prepare(n);
            const auto start = Clock::now();
            const std::uint64_t ops = k.run(n);
            const auto stop = Clock::now();
            // Let a ping-pong partner finish before the next trial starts.
            yield_now();
            const double us = std::chrono::duration<double, std::micro>(stop - start).count();
            result = us / static_cast<double>(ops);
        }
    });
    return result;
}

std::vector<double> loop_trials(std::uint64_t n, std::size_t count)
{
    std::vector<double> trials;
    trials.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto start = Clock::now();
        empty_loop(n);
        const auto stop = Clock::now();
        trials.push_back(std::chrono::duration<double, std::micro>(stop - start).count() /
                         static_cast<double>(n));
    }
    return trials;
}

}  // namespace

std::string_view name(BenchmarkId id) noexcept { return kNames[static_cast<std::size_t>(id)]; }

BenchmarkId benchmark_from_name(std::string_view text)
{
    for (BenchmarkId id : kAllBenchmarks)
        if (name(id) == text) return id;
    throw Error(Errc::not_found, "unknown benchmark id '" + std::string(text) + "'");
}

bool switch_free(BenchmarkId id) noexcept
{
    switch (id) {
    case BenchmarkId::loop_control_overhead:
    case BenchmarkId::local_call_optimised:
    case BenchmarkId::interresource_call_no_new_process:
    case BenchmarkId::semaphore_p_only:
    case BenchmarkId::semaphore_v_only:
    case BenchmarkId::semaphore_pair:
    case BenchmarkId::async_send_receive:
        return true;
    default:
        return false;
    }
}

bool spawn_heavy(BenchmarkId id) noexcept
{
    return id == BenchmarkId::process_create_destroy ||
           id == BenchmarkId::interresource_call_new_process;
}

void validate(const BenchConfig& cfg)
{
    if (cfg.trials == 0 || cfg.trials % 2 == 0)
        throw Error(Errc::invalid_argument,
                    "trials must be odd, got " + std::to_string(cfg.trials));
    if (cfg.iterations_per_trial < 1000)
        throw Error(Errc::invalid_argument, "iterations per trial must be at least 1000, got " +
                                                std::to_string(cfg.iterations_per_trial));
    if (cfg.backends.empty()) throw Error(Errc::invalid_argument, "no backend selected");
    std::set<BackendKind> seen(cfg.backends.begin(), cfg.backends.end());
    if (seen.size() != cfg.backends.size())
        throw Error(Errc::invalid_argument, "backend listed twice");
}

std::uint64_t iterations_for(BenchmarkId id, const BenchConfig& cfg) noexcept
{
    if (!spawn_heavy(id)) return cfg.iterations_per_trial;
    return std::max<std::uint64_t>(1000, cfg.iterations_per_trial / 10);
}

double median(std::vector<double> values)
{
    if (values.empty()) throw Error(Errc::invalid_argument, "median of no values");
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / 2.0;
}

double relative_difference(double a, double b) noexcept
{
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

double CalibrationCheck::relative_change() const noexcept
{
    return relative_difference(base_us, doubled_us);
}

double calibrate_loop(const BenchConfig& cfg)
{
    validate(cfg);
    require_monotonic_clock();
    loop_trials(cfg.iterations_per_trial, cfg.warmup_trials);
    return median(loop_trials(cfg.iterations_per_trial, cfg.trials));
}

CalibrationCheck check_calibration(const BenchConfig& cfg)
{
    BenchConfig doubled = cfg;
    doubled.iterations_per_trial *= 2;
    CalibrationCheck check;
    check.base_us = calibrate_loop(cfg);
    check.doubled_us = calibrate_loop(doubled);
    return check;
}

std::vector<TimingRow> measure_interleaved(BenchmarkId id, const BenchConfig& cfg,
                                           std::optional<double> calibration_us)
{
    validate(cfg);
    require_monotonic_clock();

    double calibration = 0.0;
    if (id != BenchmarkId::loop_control_overhead)
        calibration = calibration_us ? *calibration_us : calibrate_loop(cfg);

    std::vector<TimingRow> rows(cfg.backends.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].benchmark_id = std::string(name(id));
        rows[i].backend = cfg.backends[i];
        rows[i].calibration_us = calibration;
        rows[i].trials_us.reserve(cfg.trials);
    }
    // Trial-major order: a slow drift in machine speed lands on every
    // backend alike instead of on whichever ran last.
    for (std::size_t t = 0; t < cfg.trials; ++t)
        for (TimingRow& row : rows) row.trials_us.push_back(time_one_trial(id, row.backend, cfg));
    for (TimingRow& row : rows)
        row.median_us = std::max(0.0, median(row.trials_us) - row.calibration_us);
    return rows;
}

TimingRow measure(BenchmarkId id, BackendKind backend, const BenchConfig& cfg,
                  std::optional<double> calibration_us)
{
    BenchConfig one = cfg;
    one.backends = {backend};
    return measure_interleaved(id, one, calibration_us).front();
}

TimingRow measure(std::string_view benchmark_id, BackendKind backend, const BenchConfig& cfg,
                  std::optional<double> calibration_us)
{
    return measure(benchmark_from_name(benchmark_id), backend, cfg, calibration_us);
}

}  // namespace srrt::bench
