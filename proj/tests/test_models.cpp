#include <doctest.h>

#include <numbers>
#include <random>

#include "models.hpp"
#include "oracles.hpp"

using namespace glmb;

TEST_CASE("predict_density kinematics") {
    MotionModel identity;
    identity.transition = Eigen::MatrixXd::Identity(4, 4);
    identity.process_noise = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd mean(4);
    mean << 1.0, 2.0, 0.5, -0.5;
    const DensityPtr d = make_density(mean, Eigen::Matrix4d::Identity());
    const DensityPtr same = predict_density(*d, identity);
    CHECK(same->mean.isApprox(mean));
    CHECK(same->covariance.isApprox(d->covariance));

    const MotionModel cv = constant_velocity_model(1.0, 0.0, 0.99);
    Eigen::VectorXd start(4);
    start << 0.0, 0.0, 1.0, 1.0;
    const DensityPtr moved = predict_density(*make_density(start, Eigen::Matrix4d::Identity()), cv);
    Eigen::VectorXd expected(4);
    expected << 1.0, 1.0, 1.0, 1.0;
    CHECK(moved->mean.isApprox(expected));
}

TEST_CASE("predict_density matches Monte-Carlo propagation") {
    std::mt19937_64 rng(21);
    const MotionModel cv = constant_velocity_model(1.0, 0.3, 0.99);
    Eigen::VectorXd mean(4);
    mean << 2.0, -1.0, 0.7, 0.2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
    Eigen::MatrixXd cov = a * a.transpose() + Eigen::Matrix4d::Identity();
    const DensityPtr prior = make_density(mean, cov);
    const DensityPtr predicted = predict_density(*prior, cv);

    const int n = 1'000'000;
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::MatrixXd chol_prior = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
    const Eigen::MatrixXd chol_q =
        Eigen::LLT<Eigen::MatrixXd>(cv.process_noise + 1e-12 * Eigen::Matrix4d::Identity())
            .matrixL();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd z(4), w(4);
        for (int k = 0; k < 4; ++k) z(k) = normal(rng);
        for (int k = 0; k < 4; ++k) w(k) = normal(rng);
        sum += cv.transition * (mean + chol_prior * z) + chol_q * w;
    }
    const Eigen::VectorXd mc_mean = sum / n;
    // 3-sigma standard error per component.
    for (int k = 0; k < 4; ++k) {
        const double se = std::sqrt(predicted->covariance(k, k) / n);
        CHECK(std::abs(mc_mean(k) - predicted->mean(k)) < 3.0 * se + 1e-9);
    }
}

TEST_CASE("predict_density keeps covariance symmetric positive definite") {
    std::mt19937_64 rng(22);
    const MotionModel cv = constant_velocity_model(0.5, 0.2, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityPtr d = test::random_density(rng, 4);
        const DensityPtr out = predict_density(*d, cv);
        CHECK((out->covariance - out->covariance.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(Eigen::LLT<Eigen::MatrixXd>(out->covariance).info() == Eigen::Success);
    }
}

TEST_CASE("measurement_likelihood at the predicted point equals the peak value") {
    const Rect region{{-100.0, -100.0}, {100.0, 100.0}};
    const SensorModel s = position_sensor(0.1, 0.9, 0.0, region);
    Eigen::VectorXd mean(4);
    mean << 3.0, 4.0, 0.0, 0.0;
    Eigen::MatrixXd cov = 1e-12 * Eigen::Matrix4d::Identity();
    const DensityPtr d = make_density(mean, cov);
    const LikelihoodResult r = measurement_likelihood(*d, Eigen::Vector2d(3.0, 4.0), s);
    const Eigen::MatrixXd innov = s.observation * cov * s.observation.transpose() +
                                  s.noise_covariance;
    const double peak = 1.0 / (2.0 * std::numbers::pi * std::sqrt(innov.determinant()));
    CHECK(r.marginal_likelihood == doctest::Approx(peak).epsilon(1e-9));
}

TEST_CASE("measurement_likelihood with huge noise leaves the prior unchanged") {
    const Rect region{{-100.0, -100.0}, {100.0, 100.0}};
    SensorModel s = position_sensor(1e6, 0.9, 0.0, region);
    Eigen::VectorXd mean(4);
    mean << 1.0, 2.0, 0.3, 0.4;
    const DensityPtr d = make_density(mean, Eigen::Matrix4d::Identity());
    const LikelihoodResult r = measurement_likelihood(*d, Eigen::Vector2d(50.0, -20.0), s);
    CHECK((r.posterior->mean - mean).norm() < 1e-6);
    CHECK((r.posterior->covariance - d->covariance).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("measurement_likelihood matches grid quadrature") {
    const Rect region{{-100.0, -100.0}, {100.0, 100.0}};
    const SensorModel s = position_sensor(0.8, 0.9, 0.0, region);
    Eigen::VectorXd mean(4);
    mean << 0.5, -0.3, 0.1, 0.0;
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
    cov(0, 0) = 1.5;
    cov(1, 1) = 0.7;
    cov(0, 1) = cov(1, 0) = 0.3;
    const DensityPtr d = make_density(mean, cov);
    const Eigen::Vector2d z(1.2, 0.4);
    const LikelihoodResult r = measurement_likelihood(*d, z, s);

    // Quadrature over the 2-D position marginal: integral of g(z|y) p(y) dy.
    const Eigen::Vector2d pos_mean = mean.head<2>();
    const Eigen::Matrix2d pos_cov = cov.topLeftCorner<2, 2>();
    const int grid = 400;
    const double half = 8.0;
    const double h = 2.0 * half / grid;
    double integral = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Eigen::Vector2d y = pos_mean + Eigen::Vector2d(-half + (i + 0.5) * h,
                                                           -half + (j + 0.5) * h);
            const double prior = std::exp(gaussian_log_pdf(y, pos_mean, pos_cov));
            const double lik = std::exp(gaussian_log_pdf(z, y, s.noise_covariance));
            integral += prior * lik * h * h;
        }
    }
    CHECK(r.marginal_likelihood == doctest::Approx(integral).epsilon(1e-4));
}

TEST_CASE("posterior covariance shrinks in trace and Loewner order") {
    std::mt19937_64 rng(23);
    const Rect region{{-100.0, -100.0}, {100.0, 100.0}};
    const SensorModel s = position_sensor(0.5, 0.9, 0.0, region);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityPtr d = test::random_density(rng, 4);
        const LikelihoodResult r =
            measurement_likelihood(*d, Eigen::Vector2d(1.0, 1.0), s);
        CHECK(r.posterior->covariance.trace() <= d->covariance.trace() + 1e-9);
        const Eigen::MatrixXd diff = d->covariance - r.posterior->covariance;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (diff + diff.transpose()));
        CHECK(eig.eigenvalues().minCoeff() > -1e-9);
    }
}

TEST_CASE("singular innovation covariance is rejected") {
    SensorModel s;
    s.observation = Eigen::MatrixXd::Zero(2, 4);
    s.observation(0, 0) = 1.0;
    s.observation(1, 1) = 1.0;
    s.noise_covariance = Eigen::Matrix2d::Zero();
    s.region = Rect{{-1.0, -1.0}, {1.0, 1.0}};
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
    cov(0, 0) = cov(1, 1) = 1e-320;  // position variance collapses
    SingleObjectDensity d{mean, cov};
    CHECK_THROWS_AS(measurement_likelihood(d, Eigen::Vector2d(0.0, 0.0), s), GlmbError);
}

TEST_CASE("clutter intensity integrates to the clutter rate") {
    const Rect region{{0.0, 0.0}, {200.0, 50.0}};
    const SensorModel s = position_sensor(0.15, 0.9, 35.0, region);
    CHECK(s.clutter_density() * region.area() == doctest::Approx(35.0).epsilon(1e-9));
    CHECK(s.clutter_intensity(Eigen::Vector2d(10.0, 10.0)) ==
          doctest::Approx(35.0 / region.area()));
    CHECK(s.clutter_intensity(Eigen::Vector2d(-1.0, 10.0)) == 0.0);
}

TEST_CASE("adaptive_births follows the input order and positions") {
    const Rect region{{0.0, 0.0}, {100.0, 100.0}};
    const SensorModel s = position_sensor(0.15, 0.9, 10.0, region);
    BirthModel b;
    b.adaptive_birth_prob = 0.02;
    b.adaptive_velocity_cov = 25.0 * Eigen::Matrix2d::Identity();

    CHECK(adaptive_births({}, 3, b, s).empty());

    const std::vector<Eigen::Vector2d> unused = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
    const auto candidates = adaptive_births(unused, 7, b, s);
    REQUIRE(candidates.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(candidates[i].label == Label{7, i});
        CHECK(candidates[i].birth_prob == doctest::Approx(0.02));
        CHECK(candidates[i].density->mean.head<2>().isApprox(unused[i]));  // exact construction
        CHECK(candidates[i].density->mean.tail<2>().isZero());
    }
}
