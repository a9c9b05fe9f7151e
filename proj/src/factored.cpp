#include "factored.hpp"

#include <algorithm>

namespace glmb {

std::set<Label> FactoredGlmb::label_universe() const {
    std::set<Label> out;
    for (const auto& f : factors) out.insert(f.group.begin(), f.group.end());
    return out;
}

LabeledGlmb FactoredGlmb::joint() const {
    LabeledGlmb out = unit_glmb();
    for (const auto& f : factors) out = multiply(out, f.density);
    return out;
}

LabeledGlmb marginalize(const LabeledGlmb& g, const std::set<Label>& keep) {
    LabeledGlmb restricted;
    restricted.components.reserve(g.components.size());
    for (const auto& c : g.components) {
        GlmbComponent r;
        r.weight = c.weight;
        for (const auto& [l, rec] : c.records) {
            if (keep.count(l) > 0) r.records.emplace(l, rec);
        }
        restricted.components.push_back(std::move(r));
    }
    LabeledGlmb out = merge_duplicates(restricted);
    std::sort(out.components.begin(), out.components.end(), component_order);
    return out;
}

LabeledGlmb multiply(const LabeledGlmb& a, const LabeledGlmb& b) {
    const std::set<Label> ua = a.label_universe();
    for (const auto& l : b.label_universe()) {
        if (ua.count(l) > 0) {
            throw GlmbError(ErrorCode::LabelCollision,
                            "factors share label " + l.str());
        }
    }

    LabeledGlmb product;
    product.components.reserve(a.components.size() * b.components.size());
    for (const auto& ca : a.components) {
        for (const auto& cb : b.components) {
            GlmbComponent c;
            c.weight = ca.weight * cb.weight;
            c.records = ca.records;
            c.records.insert(cb.records.begin(), cb.records.end());
            product.components.push_back(std::move(c));
        }
    }
    LabeledGlmb out = merge_duplicates(product);
    std::sort(out.components.begin(), out.components.end(), component_order);
    return out;
}

FactoredGlmb refactor(const FactoredGlmb& current, const LabelPartition& new_partition,
                      std::size_t max_components, double min_weight) {
    std::set<Label> covered;
    for (const auto& g : new_partition.groups) covered.insert(g.begin(), g.end());
    if (covered != current.label_universe()) {
        throw GlmbError(ErrorCode::PartitionMismatch,
                        "new partition does not cover the current label universe");
    }

    const bool truncating = max_components != kNoTruncation || min_weight > 0.0;
    FactoredGlmb out;
    out.factors.reserve(new_partition.groups.size());
    for (const auto& group : new_partition.groups) {
        const std::set<Label> group_set(group.begin(), group.end());
        LabeledGlmb density = unit_glmb();
        bool first = true;
        for (const auto& f : current.factors) {
            std::set<Label> keep;
            for (const auto& l : f.group) {
                if (group_set.count(l) > 0) keep.insert(l);
            }
            if (keep.empty()) continue;
            LabeledGlmb piece = marginalize(f.density, keep);
            density = first ? std::move(piece) : multiply(density, piece);
            first = false;
            // Bound the intermediate product; the final truncation below
            // enforces the same cap.
            if (truncating && density.components.size() > max_components) {
                density = truncate(density, max_components, 0.0);
            }
        }
        if (truncating) density = truncate(density, max_components, min_weight);
        out.factors.push_back(GlmbFactor{group_set, std::move(density)});
    }
    return out;
}

double kld(const LabeledGlmb& p, const FactoredGlmb& q) {
    std::set<Label> universe_set = p.label_universe();
    for (const auto& l : q.label_universe()) universe_set.insert(l);
    const std::vector<Label> universe(universe_set.begin(), universe_set.end());
    if (universe.size() > detail::kKldMaxUniverse) {
        throw GlmbError(ErrorCode::UniverseTooLarge,
                        "KLD enumeration limited to " +
                            std::to_string(detail::kKldMaxUniverse) + " labels");
    }

    struct FactorView {
        std::uint64_t group_mask = 0;
        detail::SubsetSide side;
    };
    auto views = std::make_shared<std::vector<FactorView>>();
    std::uint64_t covered_mask = 0;
    for (const auto& f : q.factors) {
        FactorView v;
        for (std::size_t i = 0; i < universe.size(); ++i) {
            if (f.group.count(universe[i]) > 0) v.group_mask |= (1ULL << i);
        }
        covered_mask |= v.group_mask;
        v.side = detail::make_subset_side(f.density, universe);
        views->push_back(std::move(v));
    }

    detail::SubsetSide q_side;
    q_side.weight = [views, covered_mask](std::uint64_t mask) {
        if ((mask & ~covered_mask) != 0) return 0.0;  // labels no factor owns
        double w = 1.0;
        for (const auto& v : *views) {
            w *= v.side.weight(mask & v.group_mask);
            if (w == 0.0) return 0.0;
        }
        return w;
    };
    q_side.conditional = [views](std::uint64_t mask, std::size_t label_idx) -> DensityPtr {
        for (const auto& v : *views) {
            if ((v.group_mask >> label_idx) & 1ULL) {
                return v.side.conditional(mask & v.group_mask, label_idx);
            }
        }
        return nullptr;
    };

    return detail::kld_enumerate(universe, detail::make_subset_side(p, universe), q_side);
}

}  // namespace glmb
