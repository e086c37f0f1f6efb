#include "srrt/error.hpp"
#include "srrt/vsuite/vsuite.hpp"

#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace srrt;
using namespace srrt::vsuite;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("srrt-vsuite-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write_file(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

void add_case(const fs::path& root, const std::string& name, const std::string& manifest,
              const std::string& golden = {})
{
    write_file(root / name / "manifest.json", manifest);
    if (!golden.empty()) write_file(root / name / "expected.out", golden);
}

std::string scenario_case(const std::string& scenario, bool expected_fail = false)
{
    return R"({"scenario": ")" + scenario + R"(", "golden": "expected.out", "expected_fail": )" +
           (expected_fail ? "true" : "false") + "}";
}

void register_fixtures()
{
    static bool done = false;
    if (done) return;
    done = true;
    register_scenario("t_hello", [](BackendKind) { return std::string("hello\nworld\n"); });
    register_scenario("t_spin", [](BackendKind) -> std::string {
        for (;;) asm volatile("");
    });
    register_scenario("t_crash", [](BackendKind) -> std::string { std::abort(); });
    register_scenario("t_throw", [](BackendKind) -> std::string {
        throw Error(Errc::invalid_state, "scenario gave up");
    });
    register_scenario("t_backend",
                      [](BackendKind b) { return std::string(csw::to_string(b)) + "\n"; });
}

Errc config_error_of(const fs::path& dir)
{
    try {
        load_case(dir);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(dir.filename().string()) != std::string::npos);
        return e.code();
    }
    FAIL("manifest accepted");
    return Errc::environment;
}

TestCase hello_case(const std::string& golden, bool expected_fail = false)
{
    TestCase tc;
    tc.name = "hello";
    tc.scenario = "t_hello";
    tc.golden = golden;
    tc.expected_fail = expected_fail;
    return tc;
}

// Four passing cases, an expected failure and a deliberately broken one.
void seed_corpus(const fs::path& root, bool with_broken)
{
    register_fixtures();
    for (const char* name : {"a_hello", "b_hello", "c_hello", "d_hello"})
        add_case(root, name, scenario_case("t_hello"), "hello\nworld\n");
    add_case(root, "e_formatter", R"({"command": ["srrt-no-such-formatter"], "expected_fail": true})");
    if (with_broken) add_case(root, "f_broken", scenario_case("t_hello"), "hello\nwrold\n");
}

}  // namespace

TEST_CASE("line endings are normalised before comparison")
{
    CHECK(normalize_newlines("a\r\nb\rc\n") == "a\nb\nc\n");
    CHECK(compare_output("a\nb\n", "a\r\nb\r\n").empty());
    CHECK(compare_output("same", "same").empty());
}

TEST_CASE("a difference is located by byte offset")
{
    const std::string golden = "0123456789abcdefghij\n";
    std::string actual = golden;
    actual[17] = 'X';
    const std::string diff = compare_output(golden, actual);
    CHECK(diff.find("byte 17") != std::string::npos);
    CHECK(diff.find("line 1, column 18") != std::string::npos);
    CHECK(diff.find("'h'") != std::string::npos);
    CHECK(diff.find("'X'") != std::string::npos);

    CHECK(compare_output("abc\ndef\n", "abc\n").find("byte 4 (line 2, column 1)") != std::string::npos);
    CHECK(compare_output("abc\n", "abc\nextra").find("trailing") != std::string::npos);
}

TEST_CASE("manifest parsing")
{
    TempDir tmp;
    add_case(tmp.path(), "ok", R"({"scenario": "sem_fifo", "golden": "expected.out"})", "x\n");
    const TestCase tc = load_case(tmp.path() / "ok");
    CHECK(tc.name == "ok");
    CHECK(tc.scenario == "sem_fifo");
    CHECK(tc.golden == std::optional<std::string>("x\n"));
    CHECK_FALSE(tc.expected_fail);
    CHECK(tc.timeout == std::chrono::seconds(30));

    add_case(tmp.path(), "cmd", R"({"command": ["echo", "hi"], "expected_fail": true, "timeout": 2})");
    const TestCase cmd = load_case(tmp.path() / "cmd");
    CHECK(cmd.command == std::vector<std::string>{"echo", "hi"});
    CHECK(cmd.expected_fail);
    CHECK_FALSE(cmd.golden.has_value());
    CHECK(cmd.timeout == std::chrono::seconds(2));
}

TEST_CASE("malformed manifests are configuration errors naming the directory")
{
    TempDir tmp;
    const std::pair<const char*, const char*> bad[] = {
        {"no_golden", R"({"scenario": "sem_fifo"})"},
        {"not_json", R"({"scenario": )"},
        {"both", R"({"scenario": "x", "command": ["y"], "expected_fail": true})"},
        {"neither", R"({"expected_fail": true})"},
        {"unknown_field", R"({"scenario": "x", "expected_fail": true, "colour": 1})"},
        {"wrong_type", R"({"scenario": 3, "expected_fail": true})"},
        {"bad_timeout", R"({"scenario": "x", "expected_fail": true, "timeout": 0})"},
        {"missing_golden_file", R"({"scenario": "x", "golden": "nope.out"})"},
        {"array", "[]"},
    };
    for (const auto& [name, manifest] : bad) {
        add_case(tmp.path(), name, manifest);
        INFO(name);
        CHECK(config_error_of(tmp.path() / name) == Errc::config);
    }
}

TEST_CASE("discovery is name-sorted and skips directories without a manifest")
{
    TempDir tmp;
    for (const char* name : {"delta", "alpha", "echo", "charlie", "bravo"})
        add_case(tmp.path(), name, scenario_case("t_hello"), "hello\nworld\n");
    fs::create_directories(tmp.path() / "zz_no_manifest");
    write_file(tmp.path() / "stray.txt", "not a test");

    const auto cases = discover(tmp.path());
    REQUIRE(cases.size() == 5);
    const char* order[] = {"alpha", "bravo", "charlie", "delta", "echo"};
    for (std::size_t i = 0; i < 5; ++i) CHECK(cases[i].name == order[i]);
}

TEST_CASE("empty and missing roots")
{
    TempDir tmp;
    CHECK(discover(tmp.path()).empty());
    try {
        discover(tmp.path() / "absent");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io);
    }
}

TEST_CASE("run_case grading")
{
    register_fixtures();
    RunOptions opt;

    CHECK(run_case(hello_case("hello\nworld\n"), opt).status == Status::pass);
    CHECK(run_case(hello_case("hello\r\nworld\r\n"), opt).status == Status::pass);

    const TestOutcome bad = run_case(hello_case("hello\nwrold\n"), opt);
    CHECK(bad.status == Status::fail);
    CHECK(bad.diff.find("byte 7") != std::string::npos);
    CHECK(bad.output == "hello\nworld\n");

    CHECK(run_case(hello_case("different\n", true), opt).status == Status::xfail);
    CHECK(run_case(hello_case("hello\nworld\n", true), opt).status == Status::xpass);
}

TEST_CASE("hangs time out, crashes and errors fail")
{
    register_fixtures();
    RunOptions opt;
    TestCase spin = hello_case("x");
    spin.scenario = "t_spin";
    spin.timeout = std::chrono::seconds(1);
    const TestOutcome t = run_case(spin, opt);
    CHECK(t.status == Status::timeout);
    CHECK(t.diff.find("timed out") != std::string::npos);

    TestCase crash = hello_case("x");
    crash.scenario = "t_crash";
    const TestOutcome c = run_case(crash, opt);
    CHECK(c.status == Status::fail);
    CHECK(c.diff.find("signal") != std::string::npos);

    TestCase thrown = hello_case("x");
    thrown.scenario = "t_throw";
    CHECK(run_case(thrown, opt).status == Status::fail);

    TestCase unknown = hello_case("x");
    unknown.scenario = "no_such_scenario";
    CHECK(run_case(unknown, opt).status == Status::fail);

    crash.expected_fail = true;
    CHECK(run_case(crash, opt).status == Status::xfail);
}

TEST_CASE("normal mode prints one line, verbose adds output and diff")
{
    register_fixtures();
    std::ostringstream normal;
    RunOptions opt;
    opt.log = &normal;
    run_case(hello_case("hello\nwrold\n"), opt);
    const std::string n = normal.str();
    CHECK(std::count(n.begin(), n.end(), '\n') == 1);
    CHECK(n.rfind("fail    hello: output differs at byte 7", 0) == 0);

    std::ostringstream verbose;
    opt.log = &verbose;
    opt.verbose = true;
    run_case(hello_case("hello\nwrold\n"), opt);
    const std::string v = verbose.str();
    CHECK(v.find("--- output of hello ---\nhello\nworld\n") != std::string::npos);
    CHECK(v.find("--- expected ---\nhello\nwrold\n") != std::string::npos);
    CHECK(v.find("--- diff ---\noutput differs at byte 7") != std::string::npos);
}

TEST_CASE("an expected failure keeps the suite green, an unexpected one does not")
{
    TempDir tmp;
    seed_corpus(tmp.path(), false);
    RunOptions opt;
    SuiteReport green = run_suite(tmp.path(), opt);
    CHECK(green.count(Status::pass) == 4);
    CHECK(green.count(Status::xfail) == 1);
    CHECK(green.overall_pass());

    seed_corpus(tmp.path(), true);
    const SuiteReport red = run_suite(tmp.path(), opt);
    CHECK(red.count(Status::pass) == 4);
    CHECK(red.count(Status::xfail) == 1);
    CHECK(red.count(Status::fail) == 1);
    CHECK(red.total() == 6);
    CHECK_FALSE(red.overall_pass());
}

TEST_CASE("status algebra and xpass tolerance")
{
    SuiteReport r;
    for (Status s : {Status::pass, Status::xpass, Status::xfail}) r.add(TestOutcome{"t", s, "", ""});
    CHECK(r.overall_pass());
    std::size_t sum = 0;
    for (std::size_t c : r.counts) sum += c;
    CHECK(sum == r.total());
    CHECK(format_summary(r).find("warning: 1 expected failure(s) passed") != std::string::npos);

    r.add(TestOutcome{"t", Status::timeout, "", ""});
    CHECK_FALSE(r.overall_pass());
}

TEST_CASE("a crashing case does not stop the cases after it")
{
    register_fixtures();
    TempDir tmp;
    add_case(tmp.path(), "a_crash", scenario_case("t_crash"), "x\n");
    add_case(tmp.path(), "b_hello", scenario_case("t_hello"), "hello\nworld\n");
    const SuiteReport r = run_suite(tmp.path(), RunOptions{});
    REQUIRE(r.total() == 2);
    CHECK(r.outcomes[0].status == Status::fail);
    CHECK(r.outcomes[1].status == Status::pass);
}

TEST_CASE("reports are identical across runs")
{
    TempDir tmp;
    seed_corpus(tmp.path(), true);
    std::ostringstream first;
    std::ostringstream second;
    RunOptions opt;
    opt.log = &first;
    const SuiteReport a = run_suite(tmp.path(), opt);
    opt.log = &second;
    const SuiteReport b = run_suite(tmp.path(), opt);
    CHECK(a == b);
    CHECK(first.str() == second.str());
}

TEST_CASE("the backend reaches the scenario")
{
    register_fixtures();
    TestCase tc = hello_case("portable\n");
    tc.scenario = "t_backend";
    RunOptions opt;
    opt.backend = BackendKind::portable;
    CHECK(run_case(tc, opt).status == Status::pass);
}

TEST_CASE("built-in scenarios print the same bytes on both backends")
{
    const auto names = scenario_names();
    for (const char* n : {"async_messages", "cstest_summary", "interresource_calls",
                          "join_lifecycle", "rendezvous_echo", "scheduler_order", "sem_fifo"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    for (const std::string& n : names) {
        if (n.rfind("t_", 0) == 0) continue;
        INFO(n);
        const std::string fast = run_scenario(n, BackendKind::fast);
        CHECK_FALSE(fast.empty());
        CHECK(fast == run_scenario(n, BackendKind::portable));
    }
    try {
        run_scenario("nope", BackendKind::fast);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_found);
    }
}

TEST_CASE("shipped corpus passes against the fresh and the installed build")
{
    for (Target target : {Target::fresh, Target::installed})
        for (BackendKind b : {BackendKind::fast, BackendKind::portable}) {
            RunOptions opt;
            opt.target = target;
            opt.backend = b;
            opt.installed_binary = SRRT_BINARY;
            const SuiteReport r = run_suite(SRRT_CORPUS_DIR, opt);
            INFO(to_string(target) << " " << csw::to_string(b));
            CHECK(r.count(Status::fail) == 0);
            CHECK(r.count(Status::timeout) == 0);
            CHECK(r.count(Status::pass) == 7);
            CHECK(r.count(Status::xfail) == 1);
            CHECK(r.overall_pass());
        }
}

TEST_CASE("installed target with no binary fails each scenario case")
{
    TempDir tmp;
    add_case(tmp.path(), "a", scenario_case("sem_fifo"), "x\n");
    RunOptions opt;
    opt.target = Target::installed;
    opt.installed_binary = (tmp.path() / "missing-srrt").string();
    const SuiteReport r = run_suite(tmp.path(), opt);
    CHECK(r.count(Status::fail) == 1);
}

TEST_CASE("commands run from the test directory's point of view")
{
    TempDir tmp;
    write_file(tmp.path() / "script" / "run.sh", "#!/bin/sh\necho from script\n");
    fs::permissions(tmp.path() / "script" / "run.sh", fs::perms::owner_all);
    add_case(tmp.path(), "script", R"({"command": ["./run.sh"], "golden": "expected.out"})",
             "from script\n");
    const SuiteReport r = run_suite(tmp.path(), RunOptions{});
    REQUIRE(r.total() == 1);
    CHECK(r.outcomes[0].status == Status::pass);
}

TEST_CASE("target names")
{
    CHECK(target_from_string("installed") == Target::installed);
    CHECK(target_from_string("fresh") == Target::fresh);
    CHECK_THROWS_AS(target_from_string("stale"), Error);
}
