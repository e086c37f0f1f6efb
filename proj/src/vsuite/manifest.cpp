#include "srrt/vsuite/vsuite.hpp"

#include "srrt/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace srrt::vsuite {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_manifest(const fs::path& dir, const std::string& why)
{
    throw Error(Errc::config, "test '" + dir.filename().string() + "' (" + dir.string() +
                                  "): " + why);
}

std::optional<std::string> slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

}  // namespace

std::string_view to_string(Status status) noexcept
{
    switch (status) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::xfail: return "xfail";
    case Status::xpass: return "xpass";
    case Status::timeout: return "timeout";
    }
    return "?";
}

std::string_view to_string(Target target) noexcept
{
    return target == Target::installed ? "installed" : "fresh";
}

Target target_from_string(std::string_view name)
{
    if (name == "installed") return Target::installed;
    if (name == "fresh") return Target::fresh;
    throw Error(Errc::invalid_argument, "unknown target '" + std::string(name) + "'");
}

TestCase load_case(const fs::path& dir)
{
    const auto text = slurp(dir / kManifestName);
    if (!text) bad_manifest(dir, "cannot read " + std::string(kManifestName));

    json doc;
    try {
        doc = json::parse(*text);
    } catch (const json::parse_error& e) {
        bad_manifest(dir, std::string("malformed manifest: ") + e.what());
    }
    if (!doc.is_object()) bad_manifest(dir, "manifest must be a JSON object");

    static const std::vector<std::string> known = {"scenario", "command", "golden",
                                                   "expected_fail", "timeout"};
    for (const auto& [key, value] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            bad_manifest(dir, "unknown manifest field '" + key + "'");

    TestCase tc;
    tc.name = dir.filename().string();
    tc.dir = dir;
    try {
        if (doc.contains("scenario")) tc.scenario = doc["scenario"].get<std::string>();
        if (doc.contains("command")) tc.command = doc["command"].get<std::vector<std::string>>();
        if (doc.contains("expected_fail")) tc.expected_fail = doc["expected_fail"].get<bool>();
        if (doc.contains("timeout")) {
            const double secs = doc["timeout"].get<double>();
            if (!(secs > 0) || secs > 86400) bad_manifest(dir, "timeout must be in (0, 86400]");
            tc.timeout = std::chrono::seconds(static_cast<long>(secs + 0.999));
        }
        if (doc.contains("golden")) {
            const fs::path golden = dir / doc["golden"].get<std::string>();
            tc.golden = slurp(golden);
            if (!tc.golden) bad_manifest(dir, "cannot read golden file " + golden.string());
        }
    } catch (const json::type_error& e) {
        bad_manifest(dir, std::string("wrong field type: ") + e.what());
    }

    if (tc.scenario.empty() == tc.command.empty())
        bad_manifest(dir, "exactly one of 'scenario' and 'command' must be given");
    if (!tc.golden && !tc.expected_fail)
        bad_manifest(dir, "no golden output and not marked expected_fail");
    return tc;
}

std::vector<TestCase> discover(const fs::path& root)
{
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw Error(Errc::io, "cannot read suite directory " + root.string());

    std::vector<fs::path> dirs;
    fs::directory_iterator it(root, ec);
    if (ec) throw Error(Errc::io, "cannot read suite directory " + root.string() + ": " + ec.message());
    for (const fs::directory_entry& entry : it)
        if (entry.is_directory() && fs::exists(entry.path() / kManifestName))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });

    std::vector<TestCase> cases;
    cases.reserve(dirs.size());
    for (const fs::path& dir : dirs) cases.push_back(load_case(dir));
    return cases;
}

}  // namespace srrt::vsuite
