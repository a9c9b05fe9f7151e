#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "gaussian.hpp"
#include "label.hpp"

namespace glmb {

/// Per-label slice of an association history: the state density together
/// with a hash of the label's own measurement-assignment sequence.
struct LabelRecord {
    DensityPtr density;
    std::uint64_t lineage = 0;
};

/// One (association history, label set) term of a GLMB mixture. The label set
/// is the key set of `records`, so the distinct-label constraint and the
/// labels/densities correspondence hold by construction. The component's
/// history id is the XOR of its per-label lineages, which makes histories
/// decompose consistently under factor products and marginalization.
struct GlmbComponent {
    double weight = 0.0;
    std::map<Label, LabelRecord> records;

    [[nodiscard]] std::uint64_t history_id() const {
        std::uint64_t h = 0;
        for (const auto& [l, r] : records) h ^= r.lineage;
        return h;
    }
    [[nodiscard]] std::vector<Label> labels() const;
    [[nodiscard]] bool has_label(const Label& l) const { return records.count(l) > 0; }
    [[nodiscard]] std::size_t cardinality() const { return records.size(); }
    [[nodiscard]] const DensityPtr& density_of(const Label& l) const {
        return records.at(l).density;
    }
};

/// Canonical component order: weight descending, then history id, then label
/// set lexicographically. Used for truncation and every deterministic
/// tie-break.
bool component_order(const GlmbComponent& a, const GlmbComponent& b);

/// Weighted mixture over (history, label set) pairs with per-label Gaussian
/// densities; the filter's belief state for one label group.
struct LabeledGlmb {
    std::vector<GlmbComponent> components;

    [[nodiscard]] std::set<Label> label_universe() const;
    [[nodiscard]] double total_weight() const;

    /// Sum of weights of components containing the label.
    [[nodiscard]] double existence_probability(const Label& l) const;
};

/// GLMB with a single empty component of weight one; the identity for
/// `multiply` (its derived history id is zero).
LabeledGlmb unit_glmb();

struct CardinalityDistribution {
    std::vector<double> probabilities;  // index = object count

    [[nodiscard]] std::size_t map_estimate() const;  // smallest argmax
};

/// Scales weights to sum to one, preserving component order. Returns the
/// input unchanged when it is already exactly normalized.
LabeledGlmb normalize(LabeledGlmb g);

/// Merges components sharing (history_id, labels) by adding weights.
LabeledGlmb merge_duplicates(const LabeledGlmb& g);

/// Keeps the up-to `max_components` largest components with weight >=
/// `min_weight` and renormalizes. No-op (bit-exact) when nothing is dropped,
/// which makes truncation idempotent.
LabeledGlmb truncate(const LabeledGlmb& g, std::size_t max_components, double min_weight);

CardinalityDistribution cardinality(const LabeledGlmb& g);

/// MAP-cardinality estimator: picks n* = argmax of the cardinality
/// distribution, then the best component (canonical order) of that
/// cardinality, and reports its per-label means.
std::map<Label, Eigen::VectorXd> extract_estimates(const LabeledGlmb& g);

struct FactoredGlmb;  // factored.hpp

/// Exact KLD between two GLMBs on a small shared label universe (<= 12
/// labels), by enumerating label subsets: discrete part over subset weights
/// plus weighted per-label Gaussian terms. Per-label conditionals that mix
/// several histories are moment-matched before comparison.
double kld(const LabeledGlmb& p, const LabeledGlmb& q);
double kld(const LabeledGlmb& p, const FactoredGlmb& q);

namespace detail {

constexpr std::size_t kKldMaxUniverse = 12;

/// One side of a KLD enumeration: subset weights W(L) and per-label
/// conditional densities given an exact label set.
struct SubsetSide {
    std::function<double(std::uint64_t)> weight;                       // mask -> W(L)
    std::function<DensityPtr(std::uint64_t, std::size_t)> conditional;  // (mask, label idx)
};

double kld_enumerate(const std::vector<Label>& universe, const SubsetSide& p,
                     const SubsetSide& q);

SubsetSide make_subset_side(const LabeledGlmb& g, const std::vector<Label>& universe);

}  // namespace detail

}  // namespace glmb
