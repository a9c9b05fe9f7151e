#include "models.hpp"

namespace glmb {

MotionModel constant_velocity_model(double dt, double sigma_accel, double survival_prob) {
    MotionModel m;
    m.transition = Eigen::MatrixXd::Identity(4, 4);
    m.transition(0, 2) = dt;
    m.transition(1, 3) = dt;
    const double q = sigma_accel * sigma_accel;
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(4, 4);
    const double d4 = dt * dt * dt * dt / 4.0;
    const double d3 = dt * dt * dt / 2.0;
    const double d2 = dt * dt;
    noise(0, 0) = noise(1, 1) = q * d4;
    noise(0, 2) = noise(2, 0) = q * d3;
    noise(1, 3) = noise(3, 1) = q * d3;
    noise(2, 2) = noise(3, 3) = q * d2;
    m.process_noise = std::move(noise);
    m.survival_prob = survival_prob;
    return m;
}

SensorModel position_sensor(double sigma, double detection_prob, double clutter_rate,
                            const Rect& region) {
    SensorModel s;
    s.observation = Eigen::MatrixXd::Zero(2, 4);
    s.observation(0, 0) = 1.0;
    s.observation(1, 1) = 1.0;
    s.noise_covariance = sigma * sigma * Eigen::MatrixXd::Identity(2, 2);
    s.detection_prob = detection_prob;
    s.clutter_rate = clutter_rate;
    s.region = region;
    return s;
}

DensityPtr predict_density(const SingleObjectDensity& d, const MotionModel& m) {
    Eigen::VectorXd mean = m.transition * d.mean;
    Eigen::MatrixXd cov =
        m.transition * d.covariance * m.transition.transpose() + m.process_noise;
    return make_density(std::move(mean), std::move(cov));
}

LikelihoodResult measurement_likelihood(const SingleObjectDensity& d, const Eigen::Vector2d& z,
                                        const SensorModel& s) {
    const Eigen::MatrixXd& H = s.observation;
    const Eigen::VectorXd innovation = z - H * d.mean;
    const Eigen::MatrixXd innovation_cov =
        H * d.covariance * H.transpose() + s.noise_covariance;

    Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
    if (llt.info() != Eigen::Success) {
        throw GlmbError(ErrorCode::SingularInnovation, "innovation covariance not invertible");
    }

    LikelihoodResult out;
    out.marginal_likelihood =
        std::exp(gaussian_log_pdf(innovation, Eigen::VectorXd::Zero(innovation.size()),
                                  innovation_cov));

    const Eigen::MatrixXd gain = llt.solve(H * d.covariance).transpose();
    Eigen::VectorXd mean = d.mean + gain * innovation;
    // Joseph form keeps the covariance symmetric PSD under roundoff.
    const Eigen::MatrixXd ikh =
        Eigen::MatrixXd::Identity(d.mean.size(), d.mean.size()) - gain * H;
    Eigen::MatrixXd cov =
        ikh * d.covariance * ikh.transpose() + gain * s.noise_covariance * gain.transpose();
    out.posterior = make_density(std::move(mean), std::move(cov));
    return out;
}

std::vector<BirthCandidate> adaptive_births(const std::vector<Eigen::Vector2d>& unused_measurements,
                                            std::int32_t k, const BirthModel& b,
                                            const SensorModel& s) {
    std::vector<BirthCandidate> out;
    out.reserve(unused_measurements.size());
    for (std::size_t i = 0; i < unused_measurements.size(); ++i) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
        mean.head<2>() = unused_measurements[i];
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
        cov.topLeftCorner<2, 2>() = b.adaptive_position_inflation * s.noise_covariance;
        cov.bottomRightCorner<2, 2>() = b.adaptive_velocity_cov;
        out.push_back(BirthCandidate{Label{k, static_cast<std::int32_t>(i)},
                                     b.adaptive_birth_prob,
                                     make_density(std::move(mean), std::move(cov))});
    }
    return out;
}

}  // namespace glmb
