#include "srrt/cli/cli.hpp"
#include "srrt/subprocess.hpp"

#include <doctest.h>

#include <unistd.h>

#include <fstream>
#include <random>
#include <regex>
#include <sstream>

using namespace srrt;
using namespace srrt::cli;
namespace fs = std::filesystem;
using csw::BackendKind;

namespace {

Invocation parse_ok(const std::vector<std::string>& args)
{
    const ParseOutcome p = parse_args(args);
    INFO(p.text);
    REQUIRE(p.invocation.has_value());
    return *p.invocation;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    const ParseOutcome p = parse_args(args);
    if (!p.invocation) return {p.exit_code, p.exit_code == 0 ? p.text : "", p.text};
    std::ostringstream out;
    std::ostringstream err;
    const int code = execute(*p.invocation, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("srrt-cli-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

void write_file(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("csloop flags")
{
    const Invocation inv = parse_ok({"csloop", "--seconds", "2", "--backend", "fast"});
    CHECK(inv.command == Command::csloop);
    CHECK(inv.seconds == 2);
    CHECK(inv.backends == std::vector<BackendKind>{BackendKind::fast});
}

TEST_CASE("timings on both backends in machine-readable form")
{
    const Invocation inv =
        parse_ok({"timings", "--backend", "both", "--format", "machine-readable"});
    CHECK(inv.command == Command::timings);
    CHECK(inv.backends.size() == 2);
    CHECK(inv.format == bench::Format::json);
    CHECK(parse_ok({"timings", "--format", "json"}).format == bench::Format::json);
}

TEST_CASE("backend defaults: both for timings, fast otherwise")
{
    CHECK(parse_ok({"timings"}).backends.size() == 2);
    for (const char* sub : {"csw-test", "csloop", "vsuite"})
        CHECK(parse_ok({sub}).backends == std::vector<BackendKind>{BackendKind::fast});
    CHECK(parse_ok({"csloop"}).seconds == 2);
    const Invocation t = parse_ok({"timings"});
    CHECK(t.trials == 11);
    CHECK(t.iters == 100000);
    const Invocation v = parse_ok({"vsuite"});
    CHECK(v.dir == "vsuite");
    CHECK(v.target == vsuite::Target::fresh);
    CHECK(parse_ok({"vsuite", "--target", "installed"}).target == vsuite::Target::installed);
}

TEST_CASE("usage errors")
{
    for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
             {"bogus"},
             {},
             {"csloop", "--frobnicate"},
             {"csloop", "--backend", "turbo"},
             {"timings", "--format", "xml"},
             {"vsuite", "--format", "json"},
             {"vsuite", "--target", "stale"},
             {"csloop", "--seconds", "many"},
             {"csloop", "timings"},
         }) {
        const ParseOutcome p = parse_args(args);
        const std::string shown = args.empty() ? std::string("<none>") : args.front();
        INFO(shown);
        CHECK_FALSE(p.invocation.has_value());
        CHECK(p.exit_code == exit_code::usage);
        CHECK_FALSE(p.text.empty());
    }
}

TEST_CASE("help succeeds and lists subcommands and exit codes")
{
    const ParseOutcome p = parse_args({"--help"});
    CHECK_FALSE(p.invocation.has_value());
    CHECK(p.exit_code == 0);
    for (const char* word : {"csw-test", "csloop", "timings", "vsuite", "Exit status"})
        CHECK(p.text.find(word) != std::string::npos);
    const ParseOutcome sub = parse_args({"timings", "--help"});
    CHECK(sub.exit_code == 0);
    CHECK(sub.text.find("--iters") != std::string::npos);
}

TEST_CASE("csw-test prints a three-line summary and exits 0")
{
    const Run r = run({"csw-test"});
    CHECK(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "stack overflow detection: ok");
    CHECK(lines[1] == "stack underflow detection: ok");
    CHECK(lines[2] == "context switch order: ok");
    CHECK(r.err.empty());

    const Run both = run({"csw-test", "--backend", "both", "--verbose"});
    CHECK(both.code == 0);
    CHECK(lines_of(both.out).size() == 6);
    CHECK(lines_of(both.out)[3] == "portable: stack overflow detection: ok");
    CHECK_FALSE(both.err.empty());
}

TEST_CASE("csloop reports both backends and their ratio")
{
    const Run r = run({"csloop", "--seconds", "1", "--backend", "both"});
    CHECK(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(std::regex_match(lines[0], std::regex(R"(fast +\d+ switches in \d+\.\d{3} s, \d+\.\d{4} us per switch)")));
    CHECK(lines[1].rfind("portable ", 0) == 0);
    CHECK(lines[2].rfind("portable/fast ratio ", 0) == 0);

    const Run json = run({"csloop", "--seconds", "1", "--format", "machine-readable"});
    CHECK(json.code == 0);
    CHECK(json.out.find("\"per_switch_us\"") != std::string::npos);
    CHECK(json.out.find("\"total_switches\"") != std::string::npos);
}

TEST_CASE("timings text is twelve rows with two numeric columns")
{
    const Run r = run({"timings", "--iters", "1000", "--trials", "1"});
    CHECK(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 14);
    const std::regex data(R"((.+?)\s+(\d+\.\d{4})\s+(\d+\.\d{4}))");
    for (std::size_t i = 0; i < 12; ++i) {
        std::smatch m;
        INFO(lines[i + 2]);
        REQUIRE(std::regex_match(lines[i + 2], m, data));
        CHECK(m[1].str() == bench::name(bench::kAllBenchmarks[i]));
    }
}

TEST_CASE("timings --out writes a machine-readable table with 24 rows")
{
    TempDir tmp;
    const std::string file = (tmp.path() / "table.json").string();
    const Run r = run({"timings", "--iters", "1000", "--trials", "1", "--format",
                       "machine-readable", "--out", file});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    const bench::TimingTable t = bench::parse_table(buf.str());
    CHECK(t.rows.size() == 24);
}

TEST_CASE("module errors map to distinct exit codes")
{
    CHECK(run({"timings", "--trials", "4", "--iters", "1000"}).code == exit_code::invalid_argument);
    CHECK(run({"timings", "--iters", "10"}).code == exit_code::invalid_argument);
    const Run r = run({"csloop", "--seconds", "0"});
    CHECK(r.code == exit_code::invalid_argument);
    CHECK(r.out.empty());
    CHECK(r.err.find("srrt: ") == 0);

    TempDir tmp;
    CHECK(run({"vsuite", "--dir", (tmp.path() / "absent").string()}).code == exit_code::io);
    CHECK(run({"csw-test", "--out", (tmp.path() / "no" / "such" / "dir").string()}).code ==
          exit_code::io);

    write_file(tmp.path() / "bad" / "manifest.json", "{");
    CHECK(run({"vsuite", "--dir", tmp.str()}).code == exit_code::config);

    CHECK(run({"vsuite", "--scenario", "nope"}).code == exit_code::not_found);

    CHECK(exit_code_for(Errc::invalid_argument) == 3);
    CHECK(exit_code_for(Errc::io) == 4);
    CHECK(exit_code_for(Errc::config) == 5);
    CHECK(exit_code_for(Errc::not_found) == 6);
    for (Errc e : {Errc::conflict, Errc::invalid_target, Errc::invalid_state, Errc::deadlock,
                   Errc::capacity, Errc::environment})
        CHECK(exit_code_for(e) == exit_code::runtime);
}

TEST_CASE("vsuite exit status follows overall_pass")
{
    TempDir tmp;
    write_file(tmp.path() / "a" / "manifest.json",
               R"({"scenario": "sem_fifo", "golden": "expected.out"})");
    write_file(tmp.path() / "a" / "expected.out", vsuite::run_scenario("sem_fifo", BackendKind::fast));
    Run r = run({"vsuite", "--dir", tmp.str()});
    CHECK(r.code == 0);
    CHECK(r.out.find("pass    a\n") == 0);

    write_file(tmp.path() / "b" / "manifest.json",
               R"({"scenario": "sem_fifo", "golden": "expected.out"})");
    write_file(tmp.path() / "b" / "expected.out", "wrong\n");
    r = run({"vsuite", "--dir", tmp.str()});
    CHECK(r.code == exit_code::check_failed);
    CHECK(r.out.find("result=FAIL") != std::string::npos);
}

TEST_CASE("vsuite --scenario prints the scenario output only")
{
    const Run r = run({"vsuite", "--scenario", "sem_fifo", "--backend", "portable"});
    CHECK(r.code == 0);
    CHECK(r.out == vsuite::run_scenario("sem_fifo", BackendKind::fast));
    CHECK(r.err.empty());
}

TEST_CASE("the binary honours the same contract")
{
    const auto timeout = std::chrono::seconds(30);
    ChildOutcome help = run_command({SRRT_BINARY, "--help"}, timeout);
    CHECK(help.exited_ok());
    CHECK(help.output.find("Usage:") != std::string::npos);

    ChildOutcome bogus = run_command({SRRT_BINARY, "bogus"}, timeout);
    CHECK(bogus.exit_code == exit_code::usage);
    CHECK(bogus.output.empty());  // the complaint goes to stderr

    ChildOutcome csw = run_command({SRRT_BINARY, "csw-test"}, timeout);
    CHECK(csw.exited_ok());
    CHECK(lines_of(csw.output).size() == 3);

    ChildOutcome suite = run_command({SRRT_BINARY, "vsuite", "--dir", SRRT_CORPUS_DIR}, timeout);
    CHECK(suite.exited_ok());
    CHECK(suite.output.find("result=PASS") != std::string::npos);
}
