#include <doctest.h>

#include <random>

#include "factored.hpp"
#include "oracles.hpp"

using namespace glmb;

namespace {

/// Relabels a GLMB so its universe is disjoint from others (shifts birth
/// times by the offset).
LabeledGlmb shifted(LabeledGlmb g, int offset) {
    for (auto& c : g.components) {
        std::map<Label, LabelRecord> moved;
        for (const auto& [l, r] : c.records) {
            moved.emplace(Label{l.birth_time + offset, l.birth_index}, r);
        }
        c.records = std::move(moved);
    }
    return g;
}

bool weights_match(const LabeledGlmb& a, const LabeledGlmb& b, double tol) {
    if (a.components.size() != b.components.size()) return false;
    // Compare as (labels, weight) maps; history ids must match exactly.
    std::map<std::pair<std::uint64_t, std::vector<Label>>, double> wa, wb;
    for (const auto& c : a.components) wa[{c.history_id(), c.labels()}] = c.weight;
    for (const auto& c : b.components) wb[{c.history_id(), c.labels()}] = c.weight;
    if (wa.size() != wb.size()) return false;
    for (const auto& [key, w] : wa) {
        const auto it = wb.find(key);
        if (it == wb.end() || std::abs(it->second - w) > tol) return false;
    }
    return true;
}

LabelPartition partition_of(const std::vector<std::set<Label>>& groups) {
    LabelPartition p;
    p.gate_prob_used = 0.99;
    for (const auto& g : groups) p.groups.emplace_back(g.begin(), g.end());
    return p;
}

}  // namespace

TEST_CASE("marginalize onto the full universe only merges duplicates") {
    std::mt19937_64 rng(61);
    const LabeledGlmb g = test::random_glmb(rng, {.num_labels = 5, .num_components = 8});
    const LabeledGlmb m = marginalize(g, g.label_universe());
    CHECK(weights_match(merge_duplicates(g), m, 1e-12));
}

TEST_CASE("marginalize onto the empty set gives the unit component") {
    std::mt19937_64 rng(62);
    const LabeledGlmb g = test::random_glmb(rng, {.num_labels = 4, .num_components = 10});
    const LabeledGlmb m = marginalize(g, {});
    // Restricted histories coincide, so everything collapses to the unit.
    REQUIRE(m.components.size() == 1);
    CHECK(m.components[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.components[0].cardinality() == 0);
}

TEST_CASE("marginalize weights equal brute-force subset sums") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        const LabeledGlmb g = test::random_glmb(rng, {.num_labels = 6, .num_components = 12});
        const std::set<Label> universe = g.label_universe();
        const std::vector<Label> labels(universe.begin(), universe.end());
        const std::set<Label> keep(labels.begin(), labels.begin() + 3);
        std::vector<Label> discarded(labels.begin() + 3, labels.end());

        const LabeledGlmb m = marginalize(g, keep);

        // Oracle: per kept subset and history, sum weights over all subsets
        // of the discarded labels.
        for (const auto& kept_subset : test::all_subsets({keep.begin(), keep.end()})) {
            std::map<std::uint64_t, double> expected;
            for (const auto& c : g.components) {
                std::set<Label> in_keep;
                std::uint64_t restricted_history = 0;
                for (const auto& [l, r] : c.records) {
                    if (keep.count(l)) {
                        in_keep.insert(l);
                        restricted_history ^= r.lineage;
                    }
                }
                if (in_keep == kept_subset) expected[restricted_history] += c.weight;
            }
            for (const auto& [id, w] : expected) {
                double got = 0.0;
                for (const auto& c : m.components) {
                    std::set<Label> cl;
                    for (const auto& [l, r] : c.records) cl.insert(l);
                    if (c.history_id() == id && cl == kept_subset) got += c.weight;
                }
                CHECK(got == doctest::Approx(w).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("marginalize preserves per-label existence probabilities") {
    std::mt19937_64 rng(64);
    const LabeledGlmb g = test::random_glmb(rng, {.num_labels = 6, .num_components = 15});
    const std::set<Label> universe = g.label_universe();
        const std::vector<Label> labels(universe.begin(), universe.end());
    const std::set<Label> keep(labels.begin(), labels.begin() + 3);
    const LabeledGlmb m = marginalize(g, keep);
    for (const auto& l : keep) {
        CHECK(m.existence_probability(l) ==
              doctest::Approx(g.existence_probability(l)).epsilon(1e-12));
    }
}

TEST_CASE("multiply by the unit GLMB is the identity") {
    std::mt19937_64 rng(65);
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 4, .num_components = 6});
    const LabeledGlmb prod = multiply(a, unit_glmb());
    CHECK(weights_match(merge_duplicates(a), prod, 1e-12));
}

TEST_CASE("multiply produces the Cartesian component product") {
    std::mt19937_64 rng(66);
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 2, .num_components = 2});
    const LabeledGlmb b = shifted(test::random_glmb(rng, {.num_labels = 2, .num_components = 3}), 40);
    const LabeledGlmb prod = multiply(a, b);
    CHECK(prod.components.size() == 6);
    CHECK(prod.total_weight() == doctest::Approx(1.0).epsilon(1e-9));
    // Spot-check one weight product.
    double expected = a.components[0].weight * b.components[0].weight;
    bool found = false;
    for (const auto& c : prod.components) {
        if (std::abs(c.weight - expected) < 1e-12) found = true;
    }
    CHECK(found);
}

TEST_CASE("multiply rejects overlapping label universes") {
    std::mt19937_64 rng(67);
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 3, .num_components = 4});
    CHECK_THROWS_AS(multiply(a, a), GlmbError);
}

TEST_CASE("round trip: marginalizing a product recovers the factor") {
    std::mt19937_64 rng(68);
    for (int trial = 0; trial < 10; ++trial) {
        const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 3, .num_components = 5});
        const LabeledGlmb b =
            shifted(test::random_glmb(rng, {.num_labels = 3, .num_components = 4}), 40);
        const LabeledGlmb back = marginalize(multiply(a, b), a.label_universe());
        CHECK(weights_match(merge_duplicates(a), back, 1e-9));
    }
}

TEST_CASE("refactor onto the current grouping is a fixed point") {
    std::mt19937_64 rng(69);
    FactoredGlmb f;
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 3, .num_components = 5});
    const LabeledGlmb b =
        shifted(test::random_glmb(rng, {.num_labels = 2, .num_components = 4}), 40);
    f.factors.push_back(GlmbFactor{a.label_universe(), merge_duplicates(a)});
    f.factors.push_back(GlmbFactor{b.label_universe(), merge_duplicates(b)});

    const FactoredGlmb same =
        refactor(f, partition_of({a.label_universe(), b.label_universe()}));
    REQUIRE(same.factors.size() == 2);
    CHECK(weights_match(same.factors[0].density, f.factors[0].density, 1e-9));
    CHECK(weights_match(same.factors[1].density, f.factors[1].density, 1e-9));
}

TEST_CASE("refactor merges singleton factors via multiply") {
    std::mt19937_64 rng(70);
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 1, .num_components = 2});
    const LabeledGlmb b =
        shifted(test::random_glmb(rng, {.num_labels = 1, .num_components = 3}), 40);
    FactoredGlmb f;
    f.factors.push_back(GlmbFactor{a.label_universe(), merge_duplicates(a)});
    f.factors.push_back(GlmbFactor{b.label_universe(), merge_duplicates(b)});

    std::set<Label> both = a.label_universe();
    for (const auto& l : b.label_universe()) both.insert(l);
    const FactoredGlmb merged = refactor(f, partition_of({both}));
    REQUIRE(merged.factors.size() == 1);
    CHECK(merged.factors[0].density.components.size() ==
          f.factors[0].density.components.size() * f.factors[1].density.components.size());
}

TEST_CASE("refactor preserves the implied joint density") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        // Three factors over six labels, regrouped arbitrarily.
        const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 2, .num_components = 3});
        const LabeledGlmb b =
            shifted(test::random_glmb(rng, {.num_labels = 2, .num_components = 2}), 40);
        const LabeledGlmb c =
            shifted(test::random_glmb(rng, {.num_labels = 2, .num_components = 3}), 80);
        FactoredGlmb f;
        f.factors.push_back(GlmbFactor{a.label_universe(), merge_duplicates(a)});
        f.factors.push_back(GlmbFactor{b.label_universe(), merge_duplicates(b)});
        f.factors.push_back(GlmbFactor{c.label_universe(), merge_duplicates(c)});

        std::vector<Label> all;
        for (const auto& l : f.label_universe()) all.push_back(l);
        std::shuffle(all.begin(), all.end(), rng);
        const std::set<Label> g1(all.begin(), all.begin() + 2);
        const std::set<Label> g2(all.begin() + 2, all.begin() + 5);
        const std::set<Label> g3(all.begin() + 5, all.end());

        const FactoredGlmb after = refactor(f, partition_of({g1, g2, g3}));
        CHECK(weights_match(f.joint(), after.joint(), 1e-9));
    }
}

TEST_CASE("refactor rejects partitions that do not cover the universe") {
    std::mt19937_64 rng(72);
    const LabeledGlmb a = test::random_glmb(rng, {.num_labels = 2, .num_components = 2});
    FactoredGlmb f;
    f.factors.push_back(GlmbFactor{a.label_universe(), merge_duplicates(a)});
    CHECK_THROWS_AS(refactor(f, partition_of({{Label{99, 0}}})), GlmbError);
}

TEST_CASE("marginal product minimizes the KLD over random perturbations") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> noise(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const LabeledGlmb p = test::random_glmb(rng, {.num_labels = 6, .num_components = 10});
        const std::set<Label> universe = p.label_universe();
        const std::vector<Label> labels(universe.begin(), universe.end());
        const std::set<Label> g1(labels.begin(), labels.begin() + 3);
        const std::set<Label> g2(labels.begin() + 3, labels.end());

        FactoredGlmb marginal_product;
        marginal_product.factors.push_back(GlmbFactor{g1, marginalize(p, g1)});
        marginal_product.factors.push_back(GlmbFactor{g2, marginalize(p, g2)});
        const double best = kld(p, marginal_product);
        CHECK(best >= -1e-9);

        for (int perturb = 0; perturb < 20; ++perturb) {
            FactoredGlmb other = marginal_product;
            for (auto& factor : other.factors) {
                for (auto& comp : factor.density.components) comp.weight *= noise(rng);
                factor.density = normalize(std::move(factor.density));
            }
            CHECK(kld(p, other) >= best - 1e-9);
        }
    }
}
