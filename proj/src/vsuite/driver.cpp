#include "srrt/vsuite/vsuite.hpp"

#include "srrt/error.hpp"
#include "srrt/subprocess.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace srrt::vsuite {

namespace fs = std::filesystem;

namespace {

std::string show_byte(char c)
{
    switch (c) {
    case '\n': return "'\\n'";
    case '\t': return "'\\t'";
    default: break;
    }
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u >= 0x7f) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "0x%02x", u);
        return buf;
    }
    return std::string("'") + c + "'";
}

std::string installed_binary(const RunOptions& options)
{
    if (!options.installed_binary.empty()) return options.installed_binary;
    if (const char* env = std::getenv("SRRT_INSTALLED"); env != nullptr && *env != '\0')
        return env;
    return "srrt";
}

std::vector<std::string> command_for(const TestCase& tc, const RunOptions& options)
{
    if (!tc.scenario.empty())
        return {installed_binary(options), "vsuite", "--scenario", tc.scenario, "--backend",
                std::string(csw::to_string(options.backend))};
    std::vector<std::string> argv = tc.command;
    // A relative path with a slash names a file shipped in the test directory.
    const fs::path program(argv.front());
    if (program.is_relative() && argv.front().find('/') != std::string::npos)
        argv.front() = (tc.dir / program).string();
    return argv;
}

ChildOutcome execute(const TestCase& tc, const RunOptions& options)
{
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(tc.timeout);
    if (tc.scenario.empty() || options.target == Target::installed)
        return run_command(command_for(tc, options), timeout);

    return run_in_child(
        [&](int out_fd) {
            try {
                write_all(out_fd, run_scenario(tc.scenario, options.backend));
                return 0;
            } catch (const std::exception& e) {
                const std::string msg = "scenario " + tc.scenario + ": " + e.what() + "\n";
                (void)!::write(STDERR_FILENO, msg.data(), msg.size());
                return 1;
            }
        },
        timeout);
}

TestOutcome grade(const TestCase& tc, ChildOutcome run)
{
    TestOutcome out;
    out.name = tc.name;
    out.output = std::move(run.output);

    if (run.timed_out) {
        out.status = Status::timeout;
        out.diff = "timed out after " + std::to_string(tc.timeout.count()) + " s";
        return out;
    }

    bool matched = false;
    if (!run.exited_ok())
        out.diff = "program " + run.describe();
    else if (tc.golden)
        out.diff = compare_output(*tc.golden, out.output);
    matched = out.diff.empty();

    if (tc.expected_fail)
        out.status = matched ? Status::xpass : Status::xfail;
    else
        out.status = matched ? Status::pass : Status::fail;
    return out;
}

}  // namespace

std::string normalize_newlines(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out += '\n';
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out += text[i];
        }
    }
    return out;
}

std::string compare_output(std::string_view expected, std::string_view actual)
{
    const std::string want = normalize_newlines(expected);
    const std::string got = normalize_newlines(actual);
    if (want == got) return {};

    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t column = 1;
    while (i < want.size() && i < got.size() && want[i] == got[i]) {
        if (want[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++i;
    }

    std::string where = "output differs at byte " + std::to_string(i) + " (line " +
                        std::to_string(line) + ", column " + std::to_string(column) + "): ";
    if (i == got.size())
        return where + "output ends early, expected " + show_byte(want[i]) + " and " +
               std::to_string(want.size() - i) + " more bytes";
    if (i == want.size())
        return where + "unexpected trailing output starting with " + show_byte(got[i]);
    return where + "expected " + show_byte(want[i]) + ", got " + show_byte(got[i]);
}

bool SuiteReport::overall_pass() const noexcept
{
    return count(Status::fail) == 0 && count(Status::timeout) == 0;
}

void SuiteReport::add(TestOutcome outcome)
{
    ++counts[static_cast<std::size_t>(outcome.status)];
    outcomes.push_back(std::move(outcome));
}

std::string format_status_line(const TestOutcome& outcome)
{
    char head[16];
    std::snprintf(head, sizeof head, "%-8s", std::string(to_string(outcome.status)).c_str());
    std::string line = head + outcome.name;
    if (!outcome.diff.empty()) line += ": " + outcome.diff;
    return line + "\n";
}

std::string format_summary(const SuiteReport& r)
{
    std::string s;
    for (Status st : {Status::pass, Status::fail, Status::xfail, Status::xpass, Status::timeout})
        s += std::string(to_string(st)) + "=" + std::to_string(r.count(st)) + " ";
    s += "total=" + std::to_string(r.total());
    s += r.overall_pass() ? " result=PASS\n" : " result=FAIL\n";
    if (r.count(Status::xpass) > 0)
        s += "warning: " + std::to_string(r.count(Status::xpass)) +
             " expected failure(s) passed; the expectation may be stale\n";
    return s;
}

TestOutcome run_case(const TestCase& tc, const RunOptions& options)
{
    TestOutcome outcome;
    try {
        outcome = grade(tc, execute(tc, options));
    } catch (const std::exception& e) {
        outcome.name = tc.name;
        outcome.diff = std::string("could not run: ") + e.what();
        outcome.status = tc.expected_fail ? Status::xfail : Status::fail;
    }

    if (options.log != nullptr) {
        std::ostream& log = *options.log;
        log << format_status_line(outcome);
        if (options.verbose) {
            log << "--- output of " << tc.name << " ---\n" << outcome.output;
            if (!outcome.output.empty() && outcome.output.back() != '\n') log << '\n';
            if (!outcome.diff.empty()) {
                log << "--- expected ---\n";
                if (tc.golden) log << *tc.golden;
                log << "--- diff ---\n" << outcome.diff << '\n';
            }
        }
        log.flush();
    }
    return outcome;
}

SuiteReport run_suite(const fs::path& root, const RunOptions& options)
{
    SuiteReport report;
    for (const TestCase& tc : discover(root)) report.add(run_case(tc, options));
    if (options.log != nullptr) *options.log << format_summary(report) << std::flush;
    return report;
}

}  // namespace srrt::vsuite
