#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "association.hpp"
#include "factored.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "partition.hpp"
#include "simulator.hpp"

namespace glmb {

struct TrackerConfig {
    MotionModel motion;
    SensorModel sensor;
    BirthModel birth;
    UpdateConfig update;
    PartitionConfig partition;

    double truncation_min_weight = 1e-4;
    // Labels whose existence probability drops below this are marginalized
    // out of their factor after the update.
    double prune_existence = 0.01;
    // A label below this existence for report_miss_scans consecutive scans
    // stops being reported; its logged history is retained.
    double report_existence = 0.1;
    int report_miss_scans = 3;

    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

struct ScanDiagnostics {
    int scan = 0;
    std::size_t num_groups = 0;
    std::size_t max_group_size = 0;
    double gate_prob_used = 0.0;
    std::size_t num_measurements = 0;
    std::size_t num_birth_candidates = 0;
    std::size_t num_unassigned = 0;
    std::size_t estimated_cardinality = 0;
    double wall_ms = 0.0;
};

struct TrackerState {
    FactoredGlmb factored;
    int scan = -1;  // last processed scan index
    std::map<Label, Track> track_log;
    std::map<Label, int> low_exist_streak;
    std::set<Label> muted;
    std::vector<Eigen::Vector2d> prev_unused_measurements;
    std::vector<ScanDiagnostics> diagnostics;
};

/// Advances the tracker by one scan: per-label gates, partition, prior
/// refactorization, measurement routing, parallel per-group joint updates
/// with measurement-driven births, pruning, and estimate logging.
TrackerState step(TrackerState state, const ScanData& scan, const TrackerConfig& cfg);

struct RunResult {
    std::vector<Track> tracks;
    std::vector<ScanDiagnostics> diagnostics;
};

/// Folds step over all scans and returns the reported tracks.
RunResult run(const std::vector<ScanData>& scans, const TrackerConfig& cfg);

/// Reported tracks accumulated so far (label order).
std::vector<Track> reported_tracks(const TrackerState& state);

}  // namespace glmb
