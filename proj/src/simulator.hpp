#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "metrics.hpp"
#include "models.hpp"

namespace glmb {

struct BirthWindow {
    int start = 0;  // inclusive scan
    int end = 0;    // exclusive scan
    double rate = 0.0;  // expected births per scan (Poisson)
};

struct ScenarioConfig {
    int duration = 200;
    Rect region{{0.0, 0.0}, {1600.0, 900.0}};
    std::vector<BirthWindow> birth_windows{{0, 80, 2.2}, {120, 160, 1.5}};
    int mixture_components = 20;
    Eigen::Matrix2d mixture_scale = 1000.0 * Eigen::Matrix2d::Identity();
    int wishart_dof = 4;
    std::pair<double, double> speed_range{1.0, 8.0};     // m/s
    std::pair<int, int> lifetime_range{90, 150};         // scans
    double meas_noise_sigma = 0.15;                      // m per axis
    double detection_prob = 0.9;
    double clutter_rate = 100.0;  // Poisson mean per scan
    std::uint64_t rng_seed = 1;
};

struct ScanData {
    int scan = 0;
    std::vector<Eigen::Vector2d> measurements;
};

/// Ground truth per the standard birth/death scenario: births Poisson per
/// scan inside the configured windows, initial positions from a Gaussian
/// mixture whose covariances are drawn inverse-Wishart once per run, courses
/// uniform on [0, 2pi), speeds uniform, straight constant-velocity motion,
/// death after the sampled lifetime or on leaving the region. Deterministic
/// under the seed.
std::vector<Track> generate_truth(const ScenarioConfig& cfg);

/// Detections with probability detection_prob plus Gaussian position noise,
/// and Poisson uniform clutter; measurement order shuffled per scan.
std::vector<ScanData> generate_measurements(const std::vector<Track>& truth,
                                            const ScenarioConfig& cfg);

}  // namespace glmb
