#include "engine.hpp"

#include <algorithm>
#include <chrono>

#include "parallel.hpp"

namespace glmb {

namespace {

/// Highest-weight component containing the label; every label in the factor
/// universe has one by definition.
const GlmbComponent* best_component_with(const LabeledGlmb& density, const Label& l) {
    const GlmbComponent* best = nullptr;
    for (const auto& c : density.components) {
        if (!c.has_label(l)) continue;
        if (best == nullptr || component_order(c, *best)) best = &c;
    }
    return best;
}

struct GroupTask {
    LabeledGlmb prior;                          // normalized prior factor
    std::vector<Eigen::Vector2d> measurements;  // routed to this group
    std::vector<int> measurement_indices;       // global indices of the above
    std::vector<BirthCandidate> births;
    std::uint64_t group_id = 0;
};

struct GroupOutcome {
    LabeledGlmb posterior;
    std::set<Label> group;
    std::vector<int> used_measurements;  // global indices, top component
    bool alive = false;
};

}  // namespace

TrackerState step(TrackerState state, const ScanData& scan, const TrackerConfig& cfg) {
    if (scan.scan != state.scan + 1) {
        throw GlmbError(ErrorCode::ConfigInvalid,
                        "scan index " + std::to_string(scan.scan) + " does not follow " +
                            std::to_string(state.scan));
    }
    const auto t_start = std::chrono::steady_clock::now();

    // (a) Per-label measurement-space gates from the predicted marginals.
    std::vector<BoundingBox> boxes;
    for (const auto& factor : state.factored.factors) {
        for (const auto& l : factor.density.label_universe()) {
            const GlmbComponent* comp = best_component_with(factor.density, l);
            const DensityPtr predicted = predict_density(*comp->density_of(l), cfg.motion);
            boxes.push_back(project_box(l, *predicted, cfg.sensor,
                                        cfg.partition.initial_gate_prob));
        }
    }

    // (b) Partition labels by gate overlap.
    PartitionResult pr = build_partition(boxes, cfg.partition);

    // (c) Refactor the prior onto the new partition.
    FactoredGlmb prior = refactor(state.factored, pr.partition,
                                  cfg.update.requested_components, cfg.truncation_min_weight);

    // (d) Route measurements to groups.
    const RoutingResult routing =
        route_measurements(pr.partition, pr.boxes, scan.measurements);

    // (e) Birth candidates from measurements left unexplained last scan.
    std::vector<BirthCandidate> candidates;
    if (cfg.birth.mode == BirthMode::kMeasurementDriven) {
        candidates =
            adaptive_births(state.prev_unused_measurements, scan.scan, cfg.birth, cfg.sensor);
    } else {
        for (std::size_t i = 0; i < cfg.birth.static_components.size(); ++i) {
            candidates.push_back(BirthCandidate{Label{scan.scan, static_cast<std::int32_t>(i)},
                                                cfg.birth.static_components[i].first,
                                                cfg.birth.static_components[i].second});
        }
    }

    std::vector<GroupTask> tasks(pr.partition.groups.size());
    for (std::size_t g = 0; g < pr.partition.groups.size(); ++g) {
        tasks[g].prior = prior.factors[g].density;
        tasks[g].group_id = pr.partition.groups[g].front().hash();
        for (int idx : routing.per_group[g]) {
            tasks[g].measurements.push_back(scan.measurements[idx]);
            tasks[g].measurement_indices.push_back(idx);
        }
    }

    // A candidate joins the group whose region contains its seed; otherwise
    // it becomes a singleton group fed by the currently unassigned
    // measurements inside its own gate.
    std::map<Label, std::size_t> group_of;
    for (std::size_t g = 0; g < pr.partition.groups.size(); ++g) {
        for (const auto& l : pr.partition.groups[g]) group_of.emplace(l, g);
    }
    for (const auto& cand : candidates) {
        const Eigen::Vector2d seed = cand.density->mean.head<2>();
        bool routed = false;
        for (const auto& box : pr.boxes) {
            if (box.contains(seed)) {
                tasks[group_of.at(box.label)].births.push_back(cand);
                routed = true;
                break;
            }
        }
        if (routed) continue;
        GroupTask task;
        task.prior = unit_glmb();
        task.births.push_back(cand);
        task.group_id = cand.label.hash();
        const BoundingBox gate = project_box(cand.label, *cand.density, cfg.sensor,
                                             cfg.partition.initial_gate_prob);
        for (int idx : routing.unassigned) {
            if (gate.contains(scan.measurements[idx])) {
                task.measurements.push_back(scan.measurements[idx]);
                task.measurement_indices.push_back(idx);
            }
        }
        tasks.push_back(std::move(task));
    }

    // (e, parallel) Per-group joint updates; nothing mutable is shared and
    // each group's randomness is fixed by (seed, scan, group id).
    std::vector<GroupOutcome> outcomes(tasks.size());
    parallel_for(tasks.size(), resolve_threads(cfg.threads), [&](std::size_t g) {
        const GroupTask& task = tasks[g];
        UpdateConfig ucfg = cfg.update;
        ucfg.rng_seed = derive_seed(cfg.seed, "update", scan.scan, task.group_id);
        std::vector<int> used_local;
        LabeledGlmb posterior;
        try {
            posterior = joint_update(task.prior, task.measurements, task.births, cfg.motion,
                                     cfg.sensor, ucfg, &used_local);
        } catch (const GlmbError& e) {
            if (e.code() != ErrorCode::AllZeroWeights) {
                throw GlmbError(e.code(), "group " + std::to_string(g) + ": " + e.what());
            }
            outcomes[g].alive = false;  // degenerate group: drop it
            return;
        }

        GroupOutcome& out = outcomes[g];
        for (int local : used_local) {
            out.used_measurements.push_back(task.measurement_indices[local]);
        }

        // Marginalize out labels whose existence collapsed.
        std::set<Label> keep;
        for (const auto& l : posterior.label_universe()) {
            if (posterior.existence_probability(l) >= cfg.prune_existence) keep.insert(l);
        }
        posterior = normalize(marginalize(posterior, keep));
        out.group = posterior.label_universe();
        out.alive = !out.group.empty();
        out.posterior = std::move(posterior);
    });

    // (f) Estimates, reporting bookkeeping, next state.
    TrackerState next;
    next.scan = scan.scan;
    next.track_log = std::move(state.track_log);
    next.low_exist_streak = std::move(state.low_exist_streak);
    next.muted = std::move(state.muted);
    next.diagnostics = std::move(state.diagnostics);

    std::set<int> used;
    std::size_t estimated_cardinality = 0;
    for (auto& outcome : outcomes) {
        for (int idx : outcome.used_measurements) used.insert(idx);
        if (!outcome.alive) continue;

        for (const auto& l : outcome.group) {
            const double exist = outcome.posterior.existence_probability(l);
            if (exist < cfg.report_existence) {
                if (++next.low_exist_streak[l] >= cfg.report_miss_scans) next.muted.insert(l);
            } else {
                next.low_exist_streak[l] = 0;
            }
        }
        for (const auto& [l, mean] : extract_estimates(outcome.posterior)) {
            if (next.muted.count(l) > 0) continue;
            Track& t = next.track_log[l];
            if (t.id.empty()) t.id = l.str();
            t.states[scan.scan] = mean;
            ++estimated_cardinality;
        }
        next.factored.factors.push_back(
            GlmbFactor{std::move(outcome.group), std::move(outcome.posterior)});
    }

    for (std::size_t j = 0; j < scan.measurements.size(); ++j) {
        if (used.count(static_cast<int>(j)) == 0) {
            next.prev_unused_measurements.push_back(scan.measurements[j]);
        }
    }

    ScanDiagnostics diag;
    diag.scan = scan.scan;
    diag.num_groups = pr.partition.groups.size();
    for (const auto& g : pr.partition.groups) {
        diag.max_group_size = std::max(diag.max_group_size, g.size());
    }
    diag.gate_prob_used = pr.partition.gate_prob_used;
    diag.num_measurements = scan.measurements.size();
    diag.num_birth_candidates = candidates.size();
    diag.num_unassigned = routing.unassigned.size();
    diag.estimated_cardinality = estimated_cardinality;
    diag.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t_start)
                       .count();
    next.diagnostics.push_back(diag);
    return next;
}

RunResult run(const std::vector<ScanData>& scans, const TrackerConfig& cfg) {
    TrackerState state;
    for (const auto& scan : scans) {
        state = step(std::move(state), scan, cfg);
    }
    return RunResult{reported_tracks(state), std::move(state.diagnostics)};
}

std::vector<Track> reported_tracks(const TrackerState& state) {
    std::vector<Track> out;
    out.reserve(state.track_log.size());
    for (const auto& [l, t] : state.track_log) out.push_back(t);
    return out;
}

}  // namespace glmb
