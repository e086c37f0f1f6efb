#pragma once

#include "srrt/bench/bench.hpp"
#include "srrt/error.hpp"
#include "srrt/vsuite/vsuite.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srrt::cli {

/// Process exit statuses. Every outcome of `srrt` maps to exactly one.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;  // csw-test or vsuite found a problem
inline constexpr int usage = 2;         // unknown subcommand, flag or flag value
inline constexpr int invalid_argument = 3;
inline constexpr int io = 4;
inline constexpr int config = 5;
inline constexpr int not_found = 6;
inline constexpr int runtime = 7;  // any other runtime failure
}  // namespace exit_code

enum class Command { csw_test, csloop, timings, vsuite };

struct Invocation {
    Command command = Command::csw_test;
    std::vector<csw::BackendKind> backends;
    int seconds = 2;
    std::size_t trials = 11;
    std::uint64_t iters = 100000;
    bench::Format format = bench::Format::text;
    std::string out;  // empty: standard output
    bool verbose = false;
    std::string dir = "vsuite";
    vsuite::Target target = vsuite::Target::fresh;
    std::string scenario;  // vsuite only: run one scenario and print its output
};

/// Either an invocation to execute or a final exit status with text to
/// show (help goes to stdout, errors to stderr).
struct ParseOutcome {
    std::optional<Invocation> invocation;
    int exit_code = exit_code::ok;
    std::string text;
};

/// `args` excludes the program name.
ParseOutcome parse_args(const std::vector<std::string>& args);

/// Runs the invocation. The artifact goes to `out` (or the --out file),
/// progress and diagnostics to `err`.
int execute(const Invocation& inv, std::ostream& out, std::ostream& err);

int exit_code_for(Errc code) noexcept;

int main(int argc, char** argv);

}  // namespace srrt::cli
