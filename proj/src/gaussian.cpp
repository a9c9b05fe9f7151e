#include "gaussian.hpp"

#include <cmath>
#include <numbers>

namespace glmb {

DensityPtr make_density(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw GlmbError(ErrorCode::SingularInnovation, "covariance is not symmetric");
    }
    Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
    if (Eigen::LLT<Eigen::MatrixXd>(sym).info() != Eigen::Success) {
        throw GlmbError(ErrorCode::SingularInnovation, "covariance is not positive definite");
    }
    return std::make_shared<const SingleObjectDensity>(
        SingleObjectDensity{std::move(mean), std::move(sym)});
}

double gaussian_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov) {
    const auto d = static_cast<double>(x.size());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw GlmbError(ErrorCode::SingularInnovation, "singular covariance in Gaussian pdf");
    }
    const Eigen::VectorXd diff = x - mean;
    const Eigen::VectorXd alpha = llt.matrixL().solve(diff);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + alpha.squaredNorm());
}

double gaussian_kld(const SingleObjectDensity& from, const SingleObjectDensity& to) {
    const Eigen::Index d = from.mean.size();
    Eigen::LLT<Eigen::MatrixXd> llt_to(to.covariance);
    Eigen::LLT<Eigen::MatrixXd> llt_from(from.covariance);
    if (llt_to.info() != Eigen::Success || llt_from.info() != Eigen::Success) {
        throw GlmbError(ErrorCode::SingularInnovation, "singular covariance in Gaussian KLD");
    }
    const Eigen::MatrixXd solved = llt_to.solve(from.covariance);
    const Eigen::VectorXd diff = to.mean - from.mean;
    double log_det_ratio = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        log_det_ratio += 2.0 * (std::log(llt_to.matrixL()(i, i)) - std::log(llt_from.matrixL()(i, i)));
    }
    return 0.5 * (solved.trace() + diff.dot(llt_to.solve(diff)) - static_cast<double>(d) + log_det_ratio);
}

SingleObjectDensity moment_match(const std::vector<double>& weights,
                                 const std::vector<DensityPtr>& densities) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0 || weights.size() != densities.size() || densities.empty()) {
        throw GlmbError(ErrorCode::AllZeroWeights, "moment_match needs positive total weight");
    }
    const Eigen::Index d = densities.front()->mean.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < densities.size(); ++i) {
        mean += (weights[i] / total) * densities[i]->mean;
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < densities.size(); ++i) {
        const Eigen::VectorXd diff = densities[i]->mean - mean;
        cov += (weights[i] / total) * (densities[i]->covariance + diff * diff.transpose());
    }
    return SingleObjectDensity{std::move(mean), 0.5 * (cov + cov.transpose())};
}

}  // namespace glmb
