#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaussian.hpp"
#include "label.hpp"

namespace glmb {

/// Axis-aligned rectangle in measurement space (meters).
struct Rect {
    Eigen::Vector2d lo = Eigen::Vector2d::Zero();
    Eigen::Vector2d hi = Eigen::Vector2d::Zero();

    [[nodiscard]] double area() const { return (hi - lo).prod(); }
    [[nodiscard]] bool contains(const Eigen::Vector2d& z) const {
        return z.x() >= lo.x() && z.x() <= hi.x() && z.y() >= lo.y() && z.y() <= hi.y();
    }
    [[nodiscard]] Eigen::Vector2d clamp(const Eigen::Vector2d& z) const {
        return z.cwiseMax(lo).cwiseMin(hi);
    }
};

struct MotionModel {
    Eigen::MatrixXd transition;     // F
    Eigen::MatrixXd process_noise;  // Q, symmetric PSD
    double survival_prob = 0.999;
};

/// Constant-velocity model over timestep dt with piecewise white acceleration
/// of standard deviation sigma_accel.
MotionModel constant_velocity_model(double dt, double sigma_accel, double survival_prob);

struct SensorModel {
    Eigen::MatrixXd observation;       // H
    Eigen::MatrixXd noise_covariance;  // R, positive definite
    double detection_prob = 0.9;
    double clutter_rate = 0.0;  // Poisson mean per scan
    Rect region;

    /// kappa(z): uniform clutter intensity inside the surveillance region.
    [[nodiscard]] double clutter_intensity(const Eigen::Vector2d& z) const {
        if (!region.contains(z)) return 0.0;
        return clutter_rate / region.area();
    }
    [[nodiscard]] double clutter_density() const { return clutter_rate / region.area(); }
};

/// Position-only linear sensor with isotropic noise sigma (meters).
SensorModel position_sensor(double sigma, double detection_prob, double clutter_rate,
                            const Rect& region);

enum class BirthMode { kStatic, kMeasurementDriven };

struct BirthCandidate {
    Label label;
    double birth_prob = 0.0;
    DensityPtr density;
};

struct BirthModel {
    BirthMode mode = BirthMode::kMeasurementDriven;
    std::vector<std::pair<double, DensityPtr>> static_components;
    double adaptive_birth_prob = 0.02;
    // Covariance of the zero-mean velocity prior given to adaptive candidates.
    Eigen::MatrixXd adaptive_velocity_cov;
    // Position covariance = inflation * sensor noise; the papers in this area
    // leave the value open, so it is config-exposed.
    double adaptive_position_inflation = 4.0;
};

/// Gaussian propagation through the motion model: mean' = F m, cov' = F P F' + Q.
DensityPtr predict_density(const SingleObjectDensity& d, const MotionModel& m);

struct LikelihoodResult {
    double marginal_likelihood = 0.0;  // <g(z|.), p> = N(z; H m, H P H' + R)
    DensityPtr posterior;
};

/// Standard Gaussian measurement update. The P_D/kappa scaling of the filter
/// equations is applied by the caller.
LikelihoodResult measurement_likelihood(const SingleObjectDensity& d, const Eigen::Vector2d& z,
                                        const SensorModel& s);

/// One birth candidate per measurement left unexplained at the previous scan:
/// position centered on the measurement with inflated sensor noise, zero-mean
/// velocity prior. Labels are (k, 0..n-1) in input order.
std::vector<BirthCandidate> adaptive_births(const std::vector<Eigen::Vector2d>& unused_measurements,
                                            std::int32_t k, const BirthModel& b,
                                            const SensorModel& s);

}  // namespace glmb
