#include "srrt/bench/bench.hpp"

#include "srrt/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>

namespace srrt::bench {

namespace {

using nlohmann::json;

constexpr int kNameWidth = 42;
constexpr int kCellWidth = 15;

std::string render_text(const TimingTable& t)
{
    std::vector<std::string> ids;
    std::vector<BackendKind> backends;
    for (const TimingRow& r : t.rows) {
        if (std::find(ids.begin(), ids.end(), r.benchmark_id) == ids.end())
            ids.push_back(r.benchmark_id);
        if (std::find(backends.begin(), backends.end(), r.backend) == backends.end())
            backends.push_back(r.backend);
    }

    std::string out;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-*s", kNameWidth, "Test description");
    out += cell;
    for (BackendKind b : backends) {
        const std::string head = std::string(csw::to_string(b)) + " (us)";
        std::snprintf(cell, sizeof cell, "%*s", kCellWidth, head.c_str());
        out += cell;
    }
    out += '\n';
    out += std::string(kNameWidth + kCellWidth * backends.size(), '-');
    out += '\n';

    for (const std::string& id : ids) {
        std::snprintf(cell, sizeof cell, "%-*s", kNameWidth, id.c_str());
        out += cell;
        for (BackendKind b : backends) {
            auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const TimingRow& r) {
                return r.benchmark_id == id && r.backend == b;
            });
            if (it == t.rows.end())
                std::snprintf(cell, sizeof cell, "%*s", kCellWidth, "-");
            else
                std::snprintf(cell, sizeof cell, "%*.4f", kCellWidth, it->median_us);
            out += cell;
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const TimingTable& t)
{
    json doc;
    doc["environment"] = t.environment;
    doc["timestamp"] = t.timestamp;
    json rows = json::array();
    for (const TimingRow& r : t.rows) {
        rows.push_back({
            {"benchmark_id", r.benchmark_id},
            {"backend", std::string(csw::to_string(r.backend))},
            {"median_us", r.median_us},
            {"trials_us", r.trials_us},
            {"calibration_us", r.calibration_us},
        });
    }
    doc["rows"] = std::move(rows);
    if (t.calibration_check)
        doc["calibration_check"] = {{"base_us", t.calibration_check->base_us},
                                    {"doubled_us", t.calibration_check->doubled_us}};
    return doc.dump(2) + "\n";
}

}  // namespace

const TimingRow* TimingTable::find(BenchmarkId id, BackendKind backend) const noexcept
{
    for (const TimingRow& r : rows)
        if (r.benchmark_id == name(id) && r.backend == backend) return &r;
    return nullptr;
}

std::string render_table(const TimingTable& t, Format format)
{
    if (t.rows.empty()) throw Error(Errc::invalid_argument, "cannot render an empty timing table");
    return format == Format::text ? render_text(t) : render_json(t);
}

TimingTable parse_table(std::string_view text)
{
    try {
        const json doc = json::parse(text);
        TimingTable t;
        t.environment = doc.at("environment").get<std::string>();
        t.timestamp = doc.at("timestamp").get<std::string>();
        for (const json& r : doc.at("rows")) {
            TimingRow row;
            row.benchmark_id = r.at("benchmark_id").get<std::string>();
            row.backend = csw::backend_from_string(r.at("backend").get<std::string>());
            row.median_us = r.at("median_us").get<double>();
            row.trials_us = r.at("trials_us").get<std::vector<double>>();
            row.calibration_us = r.at("calibration_us").get<double>();
            t.rows.push_back(std::move(row));
        }
        if (doc.contains("calibration_check")) {
            const json& c = doc.at("calibration_check");
            t.calibration_check =
                CalibrationCheck{c.at("base_us").get<double>(), c.at("doubled_us").get<double>()};
        }
        return t;
    } catch (const json::exception& e) {
        throw Error(Errc::config, std::string("malformed timing table: ") + e.what());
    } catch (const Error& e) {
        throw Error(Errc::config, std::string("malformed timing table: ") + e.what());
    }
}

}  // namespace srrt::bench
