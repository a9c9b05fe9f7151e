#include "track_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "common.hpp"

namespace glmb {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw GlmbError(ErrorCode::IoFailure, "cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GlmbError(ErrorCode::IoFailure, "cannot read '" + path + "'");
    return in;
}

void check_schema(std::ifstream& in, const std::string& path, const char* expected) {
    std::string line;
    if (!std::getline(in, line)) {
        throw GlmbError(ErrorCode::IoFailure, path + ": empty file");
    }
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("schema") ||
        header["schema"] != expected) {
        throw GlmbError(ErrorCode::IoFailure,
                        path + ": expected schema '" + expected + "' on line 1");
    }
}

}  // namespace

void write_scans(const std::string& path, const std::vector<ScanData>& scans) {
    std::ofstream out = open_out(path);
    out << json{{"schema", kScansSchema}}.dump() << "\n";
    for (const auto& scan : scans) {
        json measurements = json::array();
        for (const auto& z : scan.measurements) {
            measurements.push_back(json::array({z.x(), z.y()}));
        }
        out << json{{"scan", scan.scan}, {"measurements", std::move(measurements)}}.dump()
            << "\n";
    }
}

std::vector<ScanData> read_scans(const std::string& path) {
    std::ifstream in = open_in(path);
    check_schema(in, path, kScansSchema);
    std::vector<ScanData> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("scan") ||
            !record.contains("measurements")) {
            throw GlmbError(ErrorCode::IoFailure,
                            path + ":" + std::to_string(line_no) + ": bad scan record");
        }
        ScanData scan;
        scan.scan = record["scan"].get<int>();
        for (const auto& z : record["measurements"]) {
            scan.measurements.emplace_back(z[0].get<double>(), z[1].get<double>());
        }
        out.push_back(std::move(scan));
    }
    return out;
}

void write_tracks(const std::string& path, const std::vector<Track>& tracks) {
    std::ofstream out = open_out(path);
    out << json{{"schema", kTracksSchema}}.dump() << "\n";
    for (const auto& t : tracks) {
        json states = json::array();
        for (const auto& [time, s] : t.states) {
            json row = json::array({time});
            for (Eigen::Index i = 0; i < s.size(); ++i) row.push_back(s(i));
            states.push_back(std::move(row));
        }
        out << json{{"id", t.id}, {"states", std::move(states)}}.dump() << "\n";
    }
}

std::vector<Track> read_tracks(const std::string& path) {
    std::ifstream in = open_in(path);
    check_schema(in, path, kTracksSchema);
    std::vector<Track> out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("id") || !record.contains("states")) {
            throw GlmbError(ErrorCode::IoFailure,
                            path + ":" + std::to_string(line_no) + ": bad track record");
        }
        Track t;
        t.id = record["id"].get<std::string>();
        for (const auto& row : record["states"]) {
            if (!row.is_array() || row.size() < 3) {
                throw GlmbError(ErrorCode::IoFailure, path + ":" + std::to_string(line_no) +
                                                          ": state rows are [t, x, y, ...]");
            }
            Eigen::VectorXd s(row.size() - 1);
            for (std::size_t i = 1; i < row.size(); ++i) {
                s(static_cast<Eigen::Index>(i - 1)) = row[i].get<double>();
            }
            t.states.emplace(row[0].get<int>(), std::move(s));
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_diagnostics_csv(const std::string& path, const std::vector<ScanDiagnostics>& diags) {
    std::ofstream out = open_out(path);
    out << "scan,groups,max_group_size,gate_prob,measurements,birth_candidates,unassigned,"
           "estimated_cardinality,wall_ms\n";
    char buf[256];
    for (const auto& d : diags) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%zu,%.17g,%zu,%zu,%zu,%zu,%.17g\n", d.scan,
                      d.num_groups, d.max_group_size, d.gate_prob_used, d.num_measurements,
                      d.num_birth_candidates, d.num_unassigned, d.estimated_cardinality,
                      d.wall_ms);
        out << buf;
    }
}

void write_series_csv(const std::string& path, const std::string& key_header,
                      const std::string& value_header,
                      const std::vector<std::pair<int, double>>& series) {
    std::ofstream out = open_out(path);
    out << key_header << "," << value_header << "\n";
    char buf[96];
    for (const auto& [k, v] : series) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", k, v);
        out << buf;
    }
}

std::vector<std::pair<int, double>> read_series_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw GlmbError(ErrorCode::IoFailure, path + ": empty CSV");
    }
    std::vector<std::pair<int, double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int k = 0;
        double v = 0.0;
        if (std::sscanf(line.c_str(), "%d,%lf", &k, &v) != 2) {
            throw GlmbError(ErrorCode::IoFailure, path + ": bad CSV row '" + line + "'");
        }
        out.emplace_back(k, v);
    }
    return out;
}

}  // namespace glmb
