#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaussian.hpp"
#include "label.hpp"
#include "models.hpp"

namespace glmb {

/// Probabilistic gate of one label in measurement space.
struct BoundingBox {
    Label label;
    Eigen::Vector2d lo = Eigen::Vector2d::Zero();
    Eigen::Vector2d hi = Eigen::Vector2d::Zero();

    [[nodiscard]] Eigen::Vector2d center() const { return 0.5 * (lo + hi); }
    [[nodiscard]] bool contains(const Eigen::Vector2d& z) const {
        return z.x() >= lo.x() && z.x() <= hi.x() && z.y() >= lo.y() && z.y() <= hi.y();
    }
    /// Closed-interval overlap on every axis (touching counts).
    [[nodiscard]] bool overlaps(const BoundingBox& o) const {
        return lo.x() <= o.hi.x() && o.lo.x() <= hi.x() && lo.y() <= o.hi.y() &&
               o.lo.y() <= hi.y();
    }
};

struct LabelPartition {
    std::vector<std::vector<Label>> groups;  // disjoint, sorted, union = input labels
    double gate_prob_used = 0.0;
};

struct PartitionConfig {
    std::size_t max_group_size = 20;
    double initial_gate_prob = 0.999;
    double backoff_factor = 0.8;
    std::size_t max_backoff_steps = 5;
};

/// chi-square quantile used for gate sizing.
double chi_squared_quantile(double prob, int dim);

/// Projects a state marginal onto measurement space and sizes the box so the
/// object's measurement falls inside with probability >= gate_prob: per-axis
/// half-width sqrt(chi2_quantile(gate_prob, dim)) * sqrt(S_ii) around H*mean.
BoundingBox project_box(const Label& label, const SingleObjectDensity& marginal,
                        const SensorModel& sensor, double gate_prob);

/// Partition together with the final (possibly backed-off) per-label boxes
/// that produced it; routing must use exactly these boxes.
struct PartitionResult {
    LabelPartition partition;
    std::vector<BoundingBox> boxes;
};

/// Groups labels by connected components of the box-overlap graph (R-tree
/// search + union-find). Oversized groups trigger gate backoff; if the
/// backoff budget is exhausted they are force-split by k-means on box
/// centers so the size cap always holds. Input boxes must be sized at
/// cfg.initial_gate_prob.
PartitionResult build_partition(const std::vector<BoundingBox>& boxes,
                                const PartitionConfig& cfg);

struct RoutingResult {
    std::vector<std::vector<int>> per_group;  // measurement indices per group
    std::vector<int> unassigned;
};

/// Routes each measurement to every group whose merged region (union of
/// member boxes) contains it; measurements outside all regions are reported
/// unassigned and feed adaptive birth.
RoutingResult route_measurements(const LabelPartition& partition,
                                 const std::vector<BoundingBox>& boxes,
                                 const std::vector<Eigen::Vector2d>& measurements);

}  // namespace glmb
