#include "srrt/cli/cli.hpp"

#include "srrt/csw/csloop.hpp"
#include "srrt/csw/cstest.hpp"
#include "srrt/error.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace srrt::cli {

namespace {

using csw::BackendKind;

const std::map<std::string, std::string> kBackendChoices = {
    {"fast", "fast"}, {"portable", "portable"}, {"both", "both"}};
const std::map<std::string, std::string> kFormatChoices = {
    {"text", "text"}, {"machine-readable", "json"}, {"json", "json"}};

std::vector<BackendKind> backends_from(const std::string& choice)
{
    if (choice == "both") return {BackendKind::fast, BackendKind::portable};
    return {csw::backend_from_string(choice)};
}

void write_artifact(const Invocation& inv, const std::string& text, std::ostream& out)
{
    if (inv.out.empty()) {
        out << text << std::flush;
        return;
    }
    std::ofstream file(inv.out, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) throw Error(Errc::io, "cannot write " + inv.out);
}

int run_csw_test(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    bool all = true;
    std::string text;
    for (BackendKind b : inv.backends) {
        const csw::CswTestReport report = csw::run_cstest(b);
        all = all && report.passed();
        std::istringstream lines(csw::format_summary(report));
        for (std::string line; std::getline(lines, line);) {
            if (inv.backends.size() > 1) text += std::string(csw::to_string(b)) + ": ";
            text += line + "\n";
        }
        if (inv.verbose)
            for (const std::string& d : report.detail) err << csw::to_string(b) << ": " << d << "\n";
    }
    write_artifact(inv, text, out);
    return all ? exit_code::ok : exit_code::check_failed;
}

int run_csloop(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    std::vector<std::pair<BackendKind, csw::SwitchStats>> results;
    for (BackendKind b : inv.backends) {
        if (inv.verbose) err << "csloop: " << csw::to_string(b) << " for " << inv.seconds << " s\n";
        results.emplace_back(b, csw::run_csloop(b, inv.seconds));
    }

    const csw::SwitchStats* fast = nullptr;
    const csw::SwitchStats* portable = nullptr;
    for (const auto& [b, s] : results) (b == BackendKind::fast ? fast : portable) = &s;
    const bool have_ratio = fast != nullptr && portable != nullptr && fast->per_switch > 0;

    std::string text;
    if (inv.format == bench::Format::json) {
        nlohmann::json doc;
        doc["seconds"] = inv.seconds;
        doc["rows"] = nlohmann::json::array();
        for (const auto& [b, s] : results)
            doc["rows"].push_back({{"backend", std::string(csw::to_string(b))},
                                   {"total_switches", s.total_switches},
                                   {"elapsed_s", s.elapsed},
                                   {"per_switch_us", s.per_switch}});
        if (have_ratio) doc["portable_fast_ratio"] = portable->per_switch / fast->per_switch;
        text = doc.dump(2) + "\n";
    } else {
        char line[160];
        for (const auto& [b, s] : results) {
            std::snprintf(line, sizeof line, "%-9s %llu switches in %.3f s, %.4f us per switch\n",
                          std::string(csw::to_string(b)).c_str(),
                          static_cast<unsigned long long>(s.total_switches), s.elapsed,
                          s.per_switch);
            text += line;
        }
        if (have_ratio) {
            std::snprintf(line, sizeof line, "portable/fast ratio %.2f\n",
                          portable->per_switch / fast->per_switch);
            text += line;
        }
    }
    write_artifact(inv, text, out);
    return exit_code::ok;
}

int run_timings(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    bench::BenchConfig cfg;
    cfg.iterations_per_trial = inv.iters;
    cfg.trials = inv.trials;
    cfg.backends = inv.backends;
    if (inv.verbose) err << "timings: " << cfg.trials << " trials of " << cfg.iterations_per_trial
                         << " iterations per row\n";
    const bench::TimingTable table = bench::run_suite(cfg);
    if (table.calibration_check && !table.calibration_check->consistent())
        err << "warning: loop calibration moved by "
            << table.calibration_check->relative_change() * 100
            << "% when the iteration count doubled; treat small rows with care\n";
    write_artifact(inv, bench::render_table(table, inv.format), out);
    return exit_code::ok;
}

int run_vsuite(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    if (!inv.scenario.empty()) {
        write_artifact(inv, vsuite::run_scenario(inv.scenario, inv.backends.front()), out);
        return exit_code::ok;
    }
    std::ostringstream log;
    vsuite::RunOptions options;
    options.verbose = inv.verbose;
    options.target = inv.target;
    options.backend = inv.backends.front();
    options.log = inv.out.empty() ? &out : &log;
    if (inv.verbose)
        err << "vsuite: " << inv.dir << " against the " << vsuite::to_string(inv.target)
            << " build\n";
    const vsuite::SuiteReport report = vsuite::run_suite(inv.dir, options);
    if (!inv.out.empty()) write_artifact(inv, log.str(), out);
    return report.overall_pass() ? exit_code::ok : exit_code::check_failed;
}

}  // namespace

int exit_code_for(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return exit_code::invalid_argument;
    case Errc::io: return exit_code::io;
    case Errc::config: return exit_code::config;
    case Errc::not_found: return exit_code::not_found;
    default: return exit_code::runtime;
    }
}

ParseOutcome parse_args(const std::vector<std::string>& args)
{
    CLI::App app{"Cooperative user-level threads: self tests, switch benchmark, timing suite "
                 "and verification suite driver",
                 "srrt"};
    app.require_subcommand(1, 1);
    app.footer("Exit status: 0 ok, 1 check failed, 2 usage error, 3 invalid argument, "
               "4 i/o error, 5 configuration error, 6 not found, 7 other runtime error.");

    Invocation inv;
    std::string backend;
    std::string format = "text";
    std::string target = "fresh";

    auto add_backend = [&](CLI::App* sub, const char* fallback) {
        sub->add_option("--backend", backend, std::string("fast, portable or both (default ") +
                                                  fallback + ")")
            ->transform(CLI::IsMember(kBackendChoices));
    };

    CLI::App* csw_test = app.add_subcommand("csw-test", "stack overflow, underflow and switch order checks");
    add_backend(csw_test, "fast");
    csw_test->add_flag("--verbose", inv.verbose, "print per-check detail to stderr");
    csw_test->add_option("--out", inv.out, "write the summary to this file");

    CLI::App* csloop = app.add_subcommand("csloop", "raw context switch rate");
    add_backend(csloop, "fast");
    csloop->add_option("--seconds", inv.seconds, "wall-clock seconds per backend (default 2)");
    csloop->add_option("--format", format, "text or machine-readable")
        ->transform(CLI::CheckedTransformer(kFormatChoices));
    csloop->add_option("--out", inv.out, "write the result to this file");
    csloop->add_flag("--verbose", inv.verbose, "progress on stderr");

    CLI::App* timings = app.add_subcommand("timings", "run-time system timing table");
    add_backend(timings, "both");
    timings->add_option("--trials", inv.trials, "timed trials per row, odd (default 11)");
    timings->add_option("--iters", inv.iters, "operations per trial, at least 1000 (default 100000)");
    timings->add_option("--format", format, "text or machine-readable")
        ->transform(CLI::CheckedTransformer(kFormatChoices));
    timings->add_option("--out", inv.out, "write the table to this file");
    timings->add_flag("--verbose", inv.verbose, "progress on stderr");

    CLI::App* vs = app.add_subcommand("vsuite", "golden-output verification suite");
    add_backend(vs, "fast");
    vs->add_option("--dir", inv.dir, "suite root directory (default ./vsuite)");
    vs->add_option("--target", target, "installed or fresh (default fresh)")
        ->transform(CLI::IsMember(std::vector<std::string>{"installed", "fresh"}));
    vs->add_option("--scenario", inv.scenario, "run one built-in scenario and print its output");
    vs->add_option("--out", inv.out, "write the report to this file");
    vs->add_flag("--verbose", inv.verbose, "show every output and diff");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sout;
        std::ostringstream serr;
        const int code = app.exit(e, sout, serr);
        ParseOutcome outcome;
        outcome.exit_code = code == 0 ? exit_code::ok : exit_code::usage;
        outcome.text = code == 0 ? sout.str() : serr.str();
        if (code != 0 && outcome.text.empty()) outcome.text = std::string(e.what()) + "\n";
        return outcome;
    }

    const char* fallback = "fast";
    if (timings->parsed()) {
        inv.command = Command::timings;
        fallback = "both";
    } else if (csloop->parsed()) {
        inv.command = Command::csloop;
    } else if (vs->parsed()) {
        inv.command = Command::vsuite;
    } else {
        inv.command = Command::csw_test;
    }
    inv.backends = backends_from(backend.empty() ? fallback : backend);
    inv.format = format == "json" ? bench::Format::json : bench::Format::text;
    inv.target = vsuite::target_from_string(target);

    ParseOutcome outcome;
    outcome.invocation = inv;
    return outcome;
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    try {
        switch (inv.command) {
        case Command::csw_test: return run_csw_test(inv, out, err);
        case Command::csloop: return run_csloop(inv, out, err);
        case Command::timings: return run_timings(inv, out, err);
        case Command::vsuite: return run_vsuite(inv, out, err);
        }
    } catch (const Error& e) {
        err << "srrt: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "srrt: " << e.what() << "\n";
        return exit_code::runtime;
    }
    return exit_code::runtime;
}

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    const ParseOutcome parsed = parse_args(args);
    if (!parsed.invocation) {
        (parsed.exit_code == exit_code::ok ? std::cout : std::cerr) << parsed.text;
        return parsed.exit_code;
    }
    return execute(*parsed.invocation, std::cout, std::cerr);
}

}  // namespace srrt::cli
