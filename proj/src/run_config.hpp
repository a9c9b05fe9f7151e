#pragma once

#include <string>

#include "engine.hpp"
#include "metrics.hpp"
#include "simulator.hpp"

namespace glmb {

/// Everything a run needs, loaded from one JSON file. Unknown keys are
/// rejected; all randomness derives from the single seed.
struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 0;
    std::string output_dir = "out";

    ScenarioConfig scenario;

    // Filter models (assumed by the tracker, not necessarily the truth).
    double motion_dt = 1.0;
    double motion_sigma_accel = 0.1;
    double survival_prob = 0.999;
    double sensor_sigma = 0.15;
    double sensor_detection_prob = 0.9;
    double sensor_clutter_rate = 100.0;

    double birth_prob = 0.02;
    double birth_velocity_sigma = 5.0;
    double birth_position_inflation = 4.0;

    UpdateConfig update;
    PartitionConfig partition;

    double truncation_min_weight = 1e-4;
    double prune_existence = 0.01;
    double report_existence = 0.1;
    int report_miss_scans = 3;

    MetricConfig metric;
    WindowSpec window{50, 1};

    [[nodiscard]] TrackerConfig tracker_config() const;
};

RunConfig default_run_config();

/// Parses and validates; error messages carry the line for syntax errors and
/// the dotted key path for semantic ones.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace glmb
