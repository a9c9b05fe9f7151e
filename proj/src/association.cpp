#include "association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

namespace glmb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Floor for the clutter density in clutter-free configurations; keeps the
// detection ratio finite while still letting detections dominate misses.
constexpr double kKappaFloor = 1e-30;

}  // namespace

bool AssociationMap::ownership_valid() const {
    std::vector<int> seen;
    for (int a : assignment) {
        if (a < 1) continue;
        if (std::find(seen.begin(), seen.end(), a) != seen.end()) return false;
        seen.push_back(a);
    }
    return true;
}

PreparedComponent prepare_component(const GlmbComponent& prior,
                                    const std::vector<Eigen::Vector2d>& measurements,
                                    const std::vector<BirthCandidate>& births,
                                    const MotionModel& motion, const SensorModel& sensor) {
    PreparedComponent out;
    out.prior = &prior;
    const int m = static_cast<int>(measurements.size());

    struct Row {
        Label label;
        bool birth;
        double exist_prob;  // r_B for births, survival P_S for existing labels
        DensityPtr predicted;
        std::uint64_t lineage;  // association history hash before this scan
    };
    std::vector<Row> rows;
    for (const auto& [label, record] : prior.records) {
        rows.push_back(Row{label, false, motion.survival_prob,
                           predict_density(*record.density, motion), record.lineage});
    }
    for (const auto& b : births) {
        rows.push_back(Row{b.label, true, b.birth_prob, b.density, b.label.hash()});
    }

    const int n = static_cast<int>(rows.size());
    out.psi.rows.reserve(n);
    out.psi.is_birth.reserve(n);
    out.psi.num_measurements = m;
    out.psi.log_psi.setConstant(n, m + 2, kNegInf);
    out.predicted.reserve(n);
    out.lineages.reserve(n);
    out.posteriors.assign(n, std::vector<DensityPtr>(m));

    const double miss_factor = 1.0 - sensor.detection_prob;
    for (int r = 0; r < n; ++r) {
        const Row& row = rows[r];
        out.psi.rows.push_back(row.label);
        out.psi.is_birth.push_back(row.birth);
        out.predicted.push_back(row.predicted);
        out.lineages.push_back(row.lineage);

        const double log_exist = std::log(row.exist_prob);
        if (row.exist_prob < 1.0) {
            out.psi.log_psi(r, 0) = std::log(1.0 - row.exist_prob);
        }
        if (miss_factor > 0.0) {
            out.psi.log_psi(r, 1) = log_exist + std::log(miss_factor);
        }
        if (sensor.detection_prob > 0.0) {
            for (int j = 0; j < m; ++j) {
                const LikelihoodResult lik =
                    measurement_likelihood(*row.predicted, measurements[j], sensor);
                out.posteriors[r][j] = lik.posterior;
                double kappa = sensor.clutter_intensity(measurements[j]);
                // Outside the region kappa is zero and the ratio unbounded;
                // fall back to the in-region density, floored for the
                // clutter-free case.
                if (kappa <= 0.0) kappa = std::max(sensor.clutter_density(), kKappaFloor);
                if (lik.marginal_likelihood > 0.0) {
                    out.psi.log_psi(r, j + 2) = log_exist + std::log(sensor.detection_prob) +
                                                std::log(lik.marginal_likelihood) -
                                                std::log(kappa);
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<AssociationMap, std::size_t>> gibbs_sample(const PsiTable& psi,
                                                                 std::size_t iterations,
                                                                 std::uint64_t seed) {
    const int n = static_cast<int>(psi.rows.size());
    const int m = psi.num_measurements;

    // Linear-space scores, row-rescaled for numeric safety; rescaling cancels
    // in the per-row conditionals.
    Eigen::MatrixXd scores(n, m + 2);
    for (int r = 0; r < n; ++r) {
        const double row_max = psi.log_psi.row(r).maxCoeff();
        for (int c = 0; c < m + 2; ++c) {
            const double v = psi.log_psi(r, c);
            scores(r, c) =
                (std::isfinite(v) && std::isfinite(row_max)) ? std::exp(v - row_max) : 0.0;
        }
    }

    std::vector<int> state(n, 0);              // all-misdetect start
    std::vector<int> owner(m + 1, -1);         // measurement j -> row, index 0 unused
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::map<AssociationMap, std::size_t> visits;

    std::vector<double> cum(m + 2);
    for (std::size_t it = 0; it < iterations; ++it) {
        for (int r = 0; r < n; ++r) {
            double total = 0.0;
            cum[0] = total += scores(r, 0);
            cum[1] = total += scores(r, 1);
            for (int j = 1; j <= m; ++j) {
                const bool free = owner[j] < 0 || owner[j] == r;
                cum[j + 1] = total += free ? scores(r, j + 1) : 0.0;
            }
            int next = -1;
            if (total <= 0.0) {
                next = -1;  // entire row unsupported: forced die
            } else {
                const double u = unif(rng) * total;
                int col = 0;
                while (col < m + 1 && u > cum[col]) ++col;
                next = col - 1;
            }
            const int prev = state[r];
            if (prev >= 1) owner[prev] = -1;
            if (next >= 1) owner[next] = r;
            state[r] = next;
        }
        visits[AssociationMap{state}] += 1;
    }
    return {visits.begin(), visits.end()};
}

std::vector<AssociationMap> enumerate_associations(int num_rows, int num_measurements) {
    std::vector<AssociationMap> out;
    std::vector<int> current(num_rows, -1);
    std::vector<bool> taken(num_measurements + 1, false);

    auto recurse = [&](auto&& self, int row) -> void {
        if (row == num_rows) {
            out.push_back(AssociationMap{current});
            return;
        }
        for (int a = -1; a <= num_measurements; ++a) {
            if (a >= 1) {
                if (taken[a]) continue;
                taken[a] = true;
            }
            current[row] = a;
            self(self, row + 1);
            if (a >= 1) taken[a] = false;
        }
    };
    recurse(recurse, 0);
    return out;
}

namespace {

struct MergeKey {
    std::uint64_t history_id;
    std::vector<Label> labels;

    bool operator<(const MergeKey& o) const {
        if (history_id != o.history_id) return history_id < o.history_id;
        return labels < o.labels;
    }
};

struct PendingComponent {
    double log_weight;
    GlmbComponent component;  // weight filled in after the global shift
    std::vector<int> used_measurements;
};

/// Exact filter weight (log) and posterior component for one association
/// map. Surviving labels extend their lineage with this scan's assignment,
/// so components agreeing on the fate of every surviving label merge even
/// when they came from different prior label sets.
PendingComponent materialize(const PreparedComponent& prep, const AssociationMap& assoc) {
    PendingComponent out;
    out.log_weight = std::log(prep.prior->weight);
    for (std::size_t r = 0; r < prep.psi.rows.size(); ++r) {
        const int a = assoc.assignment[r];
        out.log_weight += prep.psi.log_psi(r, PsiTable::column_of(a));
        if (a < 0) continue;
        const std::uint64_t lineage =
            hash_combine(prep.lineages[r], static_cast<std::uint64_t>(a + 1));
        if (a == 0) {
            out.component.records.emplace(prep.psi.rows[r],
                                          LabelRecord{prep.predicted[r], lineage});
        } else {
            out.component.records.emplace(prep.psi.rows[r],
                                          LabelRecord{prep.posteriors[r][a - 1], lineage});
            out.used_measurements.push_back(a - 1);
        }
    }
    std::sort(out.used_measurements.begin(), out.used_measurements.end());
    return out;
}

LabeledGlmb assemble_posterior(std::vector<PendingComponent>&& pending,
                               std::size_t max_components,
                               std::vector<int>* top_used_measurements) {
    double max_log = kNegInf;
    for (const auto& p : pending) max_log = std::max(max_log, p.log_weight);
    if (!std::isfinite(max_log)) {
        throw GlmbError(ErrorCode::AllZeroWeights,
                        "every sampled association has zero weight");
    }

    // Merging sums weights over prior components reaching the same
    // (history, labels); their measurement assignments on the surviving
    // labels coincide by construction of the history id.
    std::map<MergeKey, PendingComponent> merged;
    for (auto& p : pending) {
        const double w = std::exp(p.log_weight - max_log);
        if (w <= 0.0) continue;
        MergeKey key{p.component.history_id(), p.component.labels()};
        auto it = merged.find(key);
        if (it == merged.end()) {
            p.component.weight = w;
            merged.emplace(std::move(key), std::move(p));
        } else {
            it->second.component.weight += w;
        }
    }

    std::vector<PendingComponent> ordered;
    ordered.reserve(merged.size());
    for (auto& [key, p] : merged) ordered.push_back(std::move(p));
    std::sort(ordered.begin(), ordered.end(), [](const PendingComponent& a,
                                                 const PendingComponent& b) {
        return component_order(a.component, b.component);
    });
    if (ordered.size() > max_components) ordered.resize(max_components);

    if (top_used_measurements != nullptr) {
        top_used_measurements->clear();
        if (!ordered.empty()) *top_used_measurements = ordered.front().used_measurements;
    }

    LabeledGlmb posterior;
    posterior.components.reserve(ordered.size());
    for (auto& p : ordered) posterior.components.push_back(std::move(p.component));
    return normalize(std::move(posterior));
}

}  // namespace

LabeledGlmb joint_update(const LabeledGlmb& prior,
                         const std::vector<Eigen::Vector2d>& measurements,
                         const std::vector<BirthCandidate>& births, const MotionModel& motion,
                         const SensorModel& sensor, const UpdateConfig& cfg,
                         std::vector<int>* top_used_measurements) {
    std::vector<PendingComponent> pending;
    std::size_t comp_index = 0;
    for (const auto& prior_comp : prior.components) {
        const PreparedComponent prep =
            prepare_component(prior_comp, measurements, births, motion, sensor);
        const int rows = static_cast<int>(prep.psi.rows.size());
        const int m = prep.psi.num_measurements;

        if (static_cast<std::size_t>(rows) + static_cast<std::size_t>(m) < cfg.exact_threshold) {
            for (const auto& assoc : enumerate_associations(rows, m)) {
                pending.push_back(materialize(prep, assoc));
            }
        } else {
            const std::uint64_t seed = hash_combine(cfg.rng_seed, comp_index);
            for (const auto& visited : gibbs_sample(prep.psi, cfg.gibbs_iterations, seed)) {
                pending.push_back(materialize(prep, visited.first));
            }
        }
        ++comp_index;
    }
    return assemble_posterior(std::move(pending), cfg.requested_components,
                              top_used_measurements);
}

LabeledGlmb exhaustive_update(const LabeledGlmb& prior,
                              const std::vector<Eigen::Vector2d>& measurements,
                              const std::vector<BirthCandidate>& births,
                              const MotionModel& motion, const SensorModel& sensor) {
    std::size_t max_labels = births.size();
    for (const auto& c : prior.components) {
        max_labels = std::max(max_labels, c.cardinality() + births.size());
    }
    if (max_labels > 6 || measurements.size() > 6) {
        throw GlmbError(ErrorCode::ProblemTooLarge,
                        "exhaustive update limited to 6 labels and 6 measurements");
    }

    std::vector<PendingComponent> pending;
    for (const auto& prior_comp : prior.components) {
        const PreparedComponent prep =
            prepare_component(prior_comp, measurements, births, motion, sensor);
        for (const auto& assoc : enumerate_associations(static_cast<int>(prep.psi.rows.size()),
                                                        prep.psi.num_measurements)) {
            pending.push_back(materialize(prep, assoc));
        }
    }
    return assemble_posterior(std::move(pending), std::numeric_limits<std::size_t>::max(),
                              nullptr);
}

}  // namespace glmb
