#include "srrt/bench/bench.hpp"

#include <sys/utsname.h>

#include <ctime>
#include <fstream>

namespace srrt::bench {

namespace {

std::string cpu_model()
{
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("model name", 0) != 0) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) break;
        const auto start = line.find_first_not_of(' ', colon + 1);
        return start == std::string::npos ? std::string() : line.substr(start);
    }
    return "unknown cpu";
}

}  // namespace

std::string describe_environment()
{
    std::string text;
    utsname u{};
    if (uname(&u) == 0)
        text = std::string(u.sysname) + " " + u.release + " " + u.machine;
    else
        text = "unknown system";
    text += ", " + cpu_model();
#if defined(__clang__)
    text += ", clang " __clang_version__;
#elif defined(__GNUC__)
    text += ", gcc " __VERSION__;
#endif
    return text;
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

TimingTable run_suite(const BenchConfig& cfg)
{
    validate(cfg);
    TimingTable table;
    table.environment = describe_environment();
    table.timestamp = utc_timestamp();

    // The baseline is measured once, outside any runtime, and shared by all
    // rows so that subtraction is the same on every backend.
    table.calibration_check = check_calibration(cfg);
    const double calibration = table.calibration_check->base_us;

    for (BenchmarkId id : kAllBenchmarks)
        for (TimingRow& row : measure_interleaved(id, cfg, calibration))
            table.rows.push_back(std::move(row));
    return table;
}

}  // namespace srrt::bench
