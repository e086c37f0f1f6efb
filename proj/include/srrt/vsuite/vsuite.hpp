#pragma once

#include "srrt/csw/context.hpp"

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srrt::vsuite {

using csw::BackendKind;

enum class Status { pass, fail, xfail, xpass, timeout };
std::string_view to_string(Status status) noexcept;

enum class Target { installed, fresh };
std::string_view to_string(Target target) noexcept;
Target target_from_string(std::string_view name);

/// One test directory. Exactly one of `scenario` and `command` is set.
struct TestCase {
    std::string name;
    std::filesystem::path dir;
    std::string scenario;
    std::vector<std::string> command;
    std::optional<std::string> golden;
    bool expected_fail = false;
    std::chrono::seconds timeout{30};
};

struct TestOutcome {
    std::string name;
    Status status = Status::fail;
    std::string diff;    // empty on pass
    std::string output;  // what the program printed

    bool operator==(const TestOutcome&) const = default;
};

struct SuiteReport {
    std::vector<TestOutcome> outcomes;
    std::array<std::size_t, 5> counts{};  // indexed by Status

    std::size_t count(Status s) const noexcept { return counts[static_cast<std::size_t>(s)]; }
    std::size_t total() const noexcept { return outcomes.size(); }
    /// No fail and no timeout. An xpass is reported but tolerated.
    bool overall_pass() const noexcept;
    void add(TestOutcome outcome);

    bool operator==(const SuiteReport&) const = default;
};

inline constexpr std::string_view kManifestName = "manifest.json";

/// Reads one test directory's manifest. Any problem throws Error(config)
/// naming the directory.
TestCase load_case(const std::filesystem::path& dir);

/// Every immediate subdirectory of `root` holding a manifest, sorted by
/// name. A missing or unreadable root throws Error(io).
std::vector<TestCase> discover(const std::filesystem::path& root);

struct RunOptions {
    bool verbose = false;
    Target target = Target::fresh;
    BackendKind backend = BackendKind::fast;
    /// Where status lines (and in verbose mode, outputs and diffs) go.
    std::ostream* log = nullptr;
    /// Binary used for the installed target. Empty means $SRRT_INSTALLED,
    /// then `srrt` on PATH.
    std::string installed_binary;
};

/// Runs one case in a child process and grades it against its golden.
/// Never throws for a misbehaving program; that is a fail or a timeout.
TestOutcome run_case(const TestCase& tc, const RunOptions& options);

/// Discovers and runs every case in order, then prints a summary line.
SuiteReport run_suite(const std::filesystem::path& root, const RunOptions& options);

/// Empty when equal after line-ending normalisation, otherwise a sentence
/// locating the first differing byte.
std::string compare_output(std::string_view expected, std::string_view actual);

/// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view text);

std::string format_status_line(const TestOutcome& outcome);
std::string format_summary(const SuiteReport& report);

/// Built-in programs a manifest may name. Each prints a logical trace and
/// must produce the same bytes on every backend.
using Scenario = std::function<std::string(BackendKind)>;

/// Adds or replaces a scenario.
void register_scenario(std::string name, Scenario scenario);
std::vector<std::string> scenario_names();
bool has_scenario(std::string_view name);

/// Runs a scenario in this process. Unknown names throw Error(not_found).
std::string run_scenario(std::string_view name, BackendKind backend);

}  // namespace srrt::vsuite
