#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "common.hpp"

namespace glmb {

/// Gaussian state density of one labeled object (position+velocity, SI units).
struct SingleObjectDensity {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// Densities are immutable once built and shared freely between mixture
/// components; this keeps copies of large mixtures cheap and lets update
/// caches key on identity.
using DensityPtr = std::shared_ptr<const SingleObjectDensity>;

/// Validates symmetry (1e-9 relative) and positive definiteness, then stores
/// the symmetrized covariance. Throws GlmbError(SingularInnovation) on a
/// non-PD matrix.
DensityPtr make_density(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

double gaussian_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov);

/// KL(from || to) between two Gaussians of equal dimension.
double gaussian_kld(const SingleObjectDensity& from, const SingleObjectDensity& to);

/// Mean/covariance of a finite Gaussian mixture. Weights need not be
/// normalized; they must sum to something positive.
SingleObjectDensity moment_match(const std::vector<double>& weights,
                                 const std::vector<DensityPtr>& densities);

}  // namespace glmb
