#pragma once

#include "srrt/csw/context.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srrt::bench {

using csw::BackendKind;

enum class BenchmarkId {
    loop_control_overhead,
    local_call_optimised,
    interresource_call_no_new_process,
    interresource_call_new_process,
    process_create_destroy,
    semaphore_p_only,
    semaphore_v_only,
    semaphore_pair,
    semaphore_context_switch,
    async_send_receive,
    message_context_switch,
    rendezvous,
};

/// All ids in report order, which is also the measurement order.
inline constexpr std::array<BenchmarkId, 12> kAllBenchmarks = {
    BenchmarkId::loop_control_overhead,
    BenchmarkId::local_call_optimised,
    BenchmarkId::interresource_call_no_new_process,
    BenchmarkId::interresource_call_new_process,
    BenchmarkId::process_create_destroy,
    BenchmarkId::semaphore_p_only,
    BenchmarkId::semaphore_v_only,
    BenchmarkId::semaphore_pair,
    BenchmarkId::semaphore_context_switch,
    BenchmarkId::async_send_receive,
    BenchmarkId::message_context_switch,
    BenchmarkId::rendezvous,
};

/// The row name, e.g. "semaphore requiring context switch".
std::string_view name(BenchmarkId id) noexcept;

/// Inverse of name(). Throws Error(not_found) for anything else.
BenchmarkId benchmark_from_name(std::string_view text);

/// Rows whose operations never switch contexts, so both backends should
/// report the same cost.
bool switch_free(BenchmarkId id) noexcept;

/// Rows that spawn a process per operation and therefore run with a tenth
/// of the configured iteration count (never fewer than 1000).
bool spawn_heavy(BenchmarkId id) noexcept;

struct BenchConfig {
    std::uint64_t iterations_per_trial = 100000;
    std::size_t trials = 11;
    std::vector<BackendKind> backends = {BackendKind::fast, BackendKind::portable};
    std::size_t warmup_trials = 1;
};

/// Throws Error(invalid_argument) unless trials is odd, iterations are at
/// least 1000, and the backend list is non-empty and free of duplicates.
void validate(const BenchConfig& cfg);

/// Operations timed per trial for this row.
std::uint64_t iterations_for(BenchmarkId id, const BenchConfig& cfg) noexcept;

struct TimingRow {
    std::string benchmark_id;
    BackendKind backend = BackendKind::fast;
    double median_us = 0.0;
    std::vector<double> trials_us;  // raw per-operation cost, nothing subtracted
    double calibration_us = 0.0;

    bool operator==(const TimingRow&) const = default;
};

/// Outcome of timing the empty loop at two scales.
struct CalibrationCheck {
    double base_us = 0.0;
    double doubled_us = 0.0;

    double relative_change() const noexcept;
    bool consistent() const noexcept { return relative_change() < 0.10; }

    bool operator==(const CalibrationCheck&) const = default;
};

struct TimingTable {
    std::vector<TimingRow> rows;
    std::string environment;
    std::string timestamp;  // ISO 8601, UTC
    std::optional<CalibrationCheck> calibration_check;

    bool operator==(const TimingTable&) const = default;

    /// Row lookup, or nullptr.
    const TimingRow* find(BenchmarkId id, BackendKind backend) const noexcept;
};

double median(std::vector<double> values);

/// |a - b| / max(|a|, |b|); 0 when both are 0.
double relative_difference(double a, double b) noexcept;

/// Per-iteration cost of an empty counted loop, median over cfg.trials.
/// Throws Error(environment) if no monotonic clock is available.
double calibrate_loop(const BenchConfig& cfg);

/// Times the loop at cfg's iteration count and again at twice that.
CalibrationCheck check_calibration(const BenchConfig& cfg);

/// Runs warmup then cfg.trials timed trials of one row. `calibration_us` is
/// subtracted from every row but the loop row; when absent it is measured.
TimingRow measure(BenchmarkId id, BackendKind backend, const BenchConfig& cfg,
                  std::optional<double> calibration_us = std::nullopt);

/// Same, addressed by row name. Unknown names throw Error(not_found).
TimingRow measure(std::string_view benchmark_id, BackendKind backend, const BenchConfig& cfg,
                  std::optional<double> calibration_us = std::nullopt);

/// One row per configured backend for a single benchmark. Trials alternate
/// between backends, each in a fresh runtime.
std::vector<TimingRow> measure_interleaved(BenchmarkId id, const BenchConfig& cfg,
                                           std::optional<double> calibration_us = std::nullopt);

/// Every row for every configured backend, benchmark-major.
TimingTable run_suite(const BenchConfig& cfg);

/// "Linux 6.1 x86_64, <cpu model>"
std::string describe_environment();
std::string utc_timestamp();

enum class Format { text, json };

/// Text mirrors the paper-style table: one line per row, one column per
/// backend. json is the stable machine-readable schema. An empty table
/// throws Error(invalid_argument).
std::string render_table(const TimingTable& t, Format format);

/// Reads the json form back. Throws Error(config) on malformed input.
TimingTable parse_table(std::string_view json);

}  // namespace srrt::bench
