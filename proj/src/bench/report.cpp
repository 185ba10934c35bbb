#include <cmath>
#include <fstream>

#include "cflb/bench.hpp"
#include "cflb/error.hpp"

#ifndef CFLB_VERSION
#define CFLB_VERSION "0.0.0"
#endif

namespace cflb::bench {
namespace {

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) return "";
    }
    return v.dump();
}

}  // namespace

json Table::to_json() const {
    return {{"columns", columns}, {"rows", rows}};
}

void Table::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

const Table& Report::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) return t;
    }
    throw InvalidArgument("report has no table '" + name + "'");
}

json Report::to_json(int threads) const {
    json tabs = json::object();
    for (const auto& t : tables) tabs[t.name] = t.to_json();
    return {{"command", command},
            {"config", config},
            {"environment", {{"toolkit", "cflb"}, {"version", CFLB_VERSION}, {"threads", threads}}},
            {"tables", tabs},
            {"raw", raw}};
}

void Report::write(const std::filesystem::path& dir, int threads) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    std::ofstream out(dir / (command + ".json"));
    if (!out) throw IoError("cannot write report in " + dir.string());
    out << to_json(threads).dump(2) << '\n';
    if (!out) throw IoError("report write failed in " + dir.string());
    for (const auto& t : tables) t.write_csv(dir / (command + "_" + t.name + ".csv"));
}

std::vector<double> threshold_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw InvalidArgument("threshold_grid: need step > 0 and hi >= lo");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(std::round((lo + k * step) * 1e9) / 1e9);
    return out;
}

}  // namespace cflb::bench
