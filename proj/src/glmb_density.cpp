#include "glmb_density.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace glmb {

std::vector<Label> GlmbComponent::labels() const {
    std::vector<Label> out;
    out.reserve(records.size());
    for (const auto& [l, r] : records) out.push_back(l);
    return out;
}

bool component_order(const GlmbComponent& a, const GlmbComponent& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    const std::uint64_t ha = a.history_id();
    const std::uint64_t hb = b.history_id();
    if (ha != hb) return ha < hb;
    return std::lexicographical_compare(
        a.records.begin(), a.records.end(), b.records.begin(), b.records.end(),
        [](const auto& x, const auto& y) { return x.first < y.first; });
}

std::set<Label> LabeledGlmb::label_universe() const {
    std::set<Label> out;
    for (const auto& c : components) {
        for (const auto& [l, r] : c.records) out.insert(l);
    }
    return out;
}

double LabeledGlmb::total_weight() const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight;
    return s;
}

double LabeledGlmb::existence_probability(const Label& l) const {
    double s = 0.0;
    for (const auto& c : components) {
        if (c.has_label(l)) s += c.weight;
    }
    return s;
}

LabeledGlmb unit_glmb() {
    LabeledGlmb g;
    g.components.push_back(GlmbComponent{1.0, {}});
    return g;
}

std::size_t CardinalityDistribution::map_estimate() const {
    std::size_t best = 0;
    for (std::size_t n = 1; n < probabilities.size(); ++n) {
        if (probabilities[n] > probabilities[best]) best = n;
    }
    return best;
}

LabeledGlmb normalize(LabeledGlmb g) {
    const double sum = g.total_weight();
    if (sum <= 0.0) {
        throw GlmbError(ErrorCode::AllZeroWeights, "GLMB has no positive weight");
    }
    if (sum == 1.0) return g;
    for (auto& c : g.components) c.weight /= sum;
    return g;
}

namespace {

struct ComponentKey {
    std::uint64_t history_id;
    std::vector<Label> labels;

    bool operator==(const ComponentKey& o) const {
        return history_id == o.history_id && labels == o.labels;
    }
};

struct ComponentKeyHash {
    std::size_t operator()(const ComponentKey& k) const {
        std::uint64_t h = k.history_id;
        for (const auto& l : k.labels) h = hash_combine(h, l.hash());
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

LabeledGlmb merge_duplicates(const LabeledGlmb& g) {
    std::unordered_map<ComponentKey, std::size_t, ComponentKeyHash> index;
    LabeledGlmb out;
    out.components.reserve(g.components.size());
    for (const auto& c : g.components) {
        ComponentKey key{c.history_id(), c.labels()};
        auto [it, inserted] = index.emplace(std::move(key), out.components.size());
        if (inserted) {
            out.components.push_back(c);
        } else {
            out.components[it->second].weight += c.weight;
        }
    }
    return out;
}

LabeledGlmb truncate(const LabeledGlmb& g, std::size_t max_components, double min_weight) {
    bool dropped = false;
    for (const auto& c : g.components) {
        if (c.weight < min_weight) dropped = true;
    }
    if (!dropped && g.components.size() <= max_components) return g;

    LabeledGlmb out;
    out.components.reserve(g.components.size());
    for (const auto& c : g.components) {
        if (c.weight >= min_weight) out.components.push_back(c);
    }
    std::stable_sort(out.components.begin(), out.components.end(), component_order);
    if (out.components.size() > max_components) out.components.resize(max_components);
    return normalize(std::move(out));
}

CardinalityDistribution cardinality(const LabeledGlmb& g) {
    std::size_t max_n = 0;
    for (const auto& c : g.components) max_n = std::max(max_n, c.cardinality());
    CardinalityDistribution dist;
    dist.probabilities.assign(max_n + 1, 0.0);
    for (const auto& c : g.components) dist.probabilities[c.cardinality()] += c.weight;
    return dist;
}

std::map<Label, Eigen::VectorXd> extract_estimates(const LabeledGlmb& g) {
    const std::size_t n_star = cardinality(g).map_estimate();
    const GlmbComponent* best = nullptr;
    for (const auto& c : g.components) {
        if (c.cardinality() != n_star) continue;
        if (best == nullptr || component_order(c, *best)) best = &c;
    }
    std::map<Label, Eigen::VectorXd> out;
    if (best == nullptr) return out;
    for (const auto& [l, r] : best->records) out.emplace(l, r.density->mean);
    return out;
}

// ---- KLD by subset enumeration ----

namespace detail {

namespace {

std::uint64_t mask_of(const GlmbComponent& c, const std::map<Label, std::size_t>& index) {
    std::uint64_t m = 0;
    for (const auto& [l, r] : c.records) m |= (1ULL << index.at(l));
    return m;
}

}  // namespace

SubsetSide make_subset_side(const LabeledGlmb& g, const std::vector<Label>& universe) {
    std::map<Label, std::size_t> index;
    for (std::size_t i = 0; i < universe.size(); ++i) index.emplace(universe[i], i);

    auto by_mask = std::make_shared<std::unordered_map<std::uint64_t, std::vector<const GlmbComponent*>>>();
    auto keep_alive = std::make_shared<LabeledGlmb>(g);
    for (const auto& c : keep_alive->components) {
        (*by_mask)[mask_of(c, index)].push_back(&c);
    }

    SubsetSide side;
    side.weight = [by_mask, keep_alive](std::uint64_t mask) {
        auto it = by_mask->find(mask);
        if (it == by_mask->end()) return 0.0;
        double s = 0.0;
        for (const auto* c : it->second) s += c->weight;
        return s;
    };
    auto universe_copy = universe;
    side.conditional = [by_mask, keep_alive, universe_copy](std::uint64_t mask,
                                                            std::size_t label_idx) -> DensityPtr {
        const auto it = by_mask->find(mask);
        if (it == by_mask->end() || it->second.empty()) return nullptr;
        const Label& l = universe_copy[label_idx];
        if (it->second.size() == 1) return it->second.front()->density_of(l);
        std::vector<double> w;
        std::vector<DensityPtr> d;
        for (const auto* c : it->second) {
            w.push_back(c->weight);
            d.push_back(c->density_of(l));
        }
        return std::make_shared<const SingleObjectDensity>(moment_match(w, d));
    };
    return side;
}

double kld_enumerate(const std::vector<Label>& universe, const SubsetSide& p,
                     const SubsetSide& q) {
    if (universe.size() > kKldMaxUniverse) {
        throw GlmbError(ErrorCode::UniverseTooLarge,
                        "KLD enumeration limited to " + std::to_string(kKldMaxUniverse) + " labels");
    }
    const std::uint64_t n_masks = 1ULL << universe.size();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
        const double wp = p.weight(mask);
        if (wp <= 0.0) continue;  // zero p-mass subsets contribute nothing
        const double wq = q.weight(mask);
        if (wq <= 0.0) {
            throw GlmbError(ErrorCode::SupportMismatch,
                            "approximation assigns zero mass to a supported label set");
        }
        total += wp * std::log(wp / wq);
        for (std::size_t i = 0; i < universe.size(); ++i) {
            if ((mask & (1ULL << i)) == 0) continue;
            DensityPtr dp = p.conditional(mask, i);
            DensityPtr dq = q.conditional(mask, i);
            if (dp == nullptr || dq == nullptr) continue;
            if (dp == dq) continue;
            total += wp * gaussian_kld(*dp, *dq);
        }
    }
    return total;
}

}  // namespace detail

double kld(const LabeledGlmb& p, const LabeledGlmb& q) {
    std::set<Label> universe_set = p.label_universe();
    for (const auto& l : q.label_universe()) universe_set.insert(l);
    std::vector<Label> universe(universe_set.begin(), universe_set.end());
    return detail::kld_enumerate(universe, detail::make_subset_side(p, universe),
                                 detail::make_subset_side(q, universe));
}

}  // namespace glmb
