#pragma once

#include <set>
#include <vector>

#include "glmb_density.hpp"
#include "partition.hpp"

namespace glmb {

struct GlmbFactor {
    std::set<Label> group;  // owned label group; density universe is a subset
    LabeledGlmb density;    // normalized
};

/// Product of label-disjoint GLMB factors approximating the full posterior.
struct FactoredGlmb {
    std::vector<GlmbFactor> factors;

    [[nodiscard]] std::set<Label> label_universe() const;

    /// Full product of all factors. Exponential in factor count; intended for
    /// tests and small problems only.
    [[nodiscard]] LabeledGlmb joint() const;
};

/// Marginal GLMB onto `keep`: restricts every component's label set and
/// densities, then merges components sharing (history, restricted labels) by
/// adding weights. Per-label densities are unchanged and total weight is
/// preserved exactly.
LabeledGlmb marginalize(const LabeledGlmb& g, const std::set<Label>& keep);

/// Product of two GLMBs on disjoint label universes: Cartesian component
/// product with weight products and an order-independent combined history id.
LabeledGlmb multiply(const LabeledGlmb& a, const LabeledGlmb& b);

/// No-truncation marker for refactor.
inline constexpr std::size_t kNoTruncation = static_cast<std::size_t>(-1);

/// Re-expresses a factored density on a new partition: each factor is split
/// by marginalization onto its intersections with the new groups, then the
/// pieces of each new group are multiplied back together and truncated.
/// The new partition must cover exactly the current label universe.
FactoredGlmb refactor(const FactoredGlmb& current, const LabelPartition& new_partition,
                      std::size_t max_components = kNoTruncation, double min_weight = 0.0);

}  // namespace glmb
