#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "glmb_density.hpp"
#include "models.hpp"

namespace glmb {

/// Assignment of one table row (existing label or birth candidate) per entry:
/// -1 = died / not born, 0 = misdetected, j >= 1 = measurement index j.
struct AssociationMap {
    std::vector<int> assignment;

    /// No measurement index may be claimed by more than one row.
    [[nodiscard]] bool ownership_valid() const;

    bool operator<(const AssociationMap& o) const { return assignment < o.assignment; }
    bool operator==(const AssociationMap& o) const { return assignment == o.assignment; }
};

struct UpdateConfig {
    std::size_t requested_components = 50;  // K
    std::size_t gibbs_iterations = 300;     // full sweeps per prior component
    std::uint64_t rng_seed = 0;
    std::size_t exact_threshold = 10;  // enumerate when rows + measurements < this
};

/// Per-row association scores for one prior component. Column 0 encodes the
/// -1 (die / not-born) choice, column 1 misdetection, column 2+j measurement
/// j. Rows are the component's labels in label order followed by birth
/// candidates in input order. Scores fold the existence factor into every
/// column, so the product over rows is the full association weight.
struct PsiTable {
    std::vector<Label> rows;
    std::vector<bool> is_birth;
    Eigen::MatrixXd log_psi;  // rows x (M+2), -inf marks zero score
    int num_measurements = 0;

    [[nodiscard]] static int column_of(int assignment) { return assignment + 1; }
};

/// Scores plus the conditional densities needed to materialize posterior
/// components from sampled associations.
struct PreparedComponent {
    const GlmbComponent* prior = nullptr;
    PsiTable psi;
    std::vector<DensityPtr> predicted;                // per row
    std::vector<std::uint64_t> lineages;              // per row, pre-update
    std::vector<std::vector<DensityPtr>> posteriors;  // [row][measurement]
};

PreparedComponent prepare_component(const GlmbComponent& prior,
                                    const std::vector<Eigen::Vector2d>& measurements,
                                    const std::vector<BirthCandidate>& births,
                                    const MotionModel& motion, const SensorModel& sensor);

/// Systematic-sweep Gibbs sampler over valid association maps. Stationary
/// distribution is proportional to the product of row scores; one sweep
/// resamples every row once from its conditional given the others. Starts at
/// the all-misdetect map and records the state after every sweep. Returns
/// distinct maps with visit counts, ordered lexicographically.
std::vector<std::pair<AssociationMap, std::size_t>> gibbs_sample(const PsiTable& psi,
                                                                 std::size_t iterations,
                                                                 std::uint64_t seed);

/// All valid association maps (unrestricted; callers guard size).
std::vector<AssociationMap> enumerate_associations(int num_rows, int num_measurements);

/// Joint prediction/measurement update of one label group. Associations come
/// from exhaustive enumeration for small problems and Gibbs sampling
/// otherwise; posterior weights are always the exact filter weights of the
/// discovered maps. Returns at most cfg.requested_components components,
/// normalized. When `top_used_measurements` is given it receives the sorted
/// measurement indices claimed by the highest-weight posterior component,
/// which drives measurement-driven birth.
LabeledGlmb joint_update(const LabeledGlmb& prior,
                         const std::vector<Eigen::Vector2d>& measurements,
                         const std::vector<BirthCandidate>& births, const MotionModel& motion,
                         const SensorModel& sensor, const UpdateConfig& cfg,
                         std::vector<int>* top_used_measurements = nullptr);

/// Exact posterior over every valid association map. Guarded to tiny
/// instances; serves as the oracle for the sampled path.
LabeledGlmb exhaustive_update(const LabeledGlmb& prior,
                              const std::vector<Eigen::Vector2d>& measurements,
                              const std::vector<BirthCandidate>& births,
                              const MotionModel& motion, const SensorModel& sensor);

}  // namespace glmb
