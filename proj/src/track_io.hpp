#pragma once

#include <string>
#include <vector>

#include "engine.hpp"
#include "metrics.hpp"
#include "simulator.hpp"

namespace glmb {

// Line-oriented formats so multi-gigabyte runs stream: first line is a
// schema tag, every following line one JSON object.
inline constexpr const char* kScansSchema = "glmb.scans.v1";
inline constexpr const char* kTracksSchema = "glmb.tracks.v1";

/// {"scan": k, "measurements": [[x, y], ...]} per line.
void write_scans(const std::string& path, const std::vector<ScanData>& scans);
std::vector<ScanData> read_scans(const std::string& path);

/// {"id": "...", "states": [[t, x, y, vx, vy], ...]} per line.
void write_tracks(const std::string& path, const std::vector<Track>& tracks);
std::vector<Track> read_tracks(const std::string& path);

void write_diagnostics_csv(const std::string& path, const std::vector<ScanDiagnostics>& diags);

/// Two-column CSV with a header row.
void write_series_csv(const std::string& path, const std::string& key_header,
                      const std::string& value_header,
                      const std::vector<std::pair<int, double>>& series);
std::vector<std::pair<int, double>> read_series_csv(const std::string& path);

}  // namespace glmb
