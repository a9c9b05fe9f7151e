#include <doctest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "partition.hpp"

using namespace glmb;

namespace {

BoundingBox box_at(int idx, double x, double y, double half) {
    return BoundingBox{Label{0, idx}, Eigen::Vector2d(x - half, y - half),
                       Eigen::Vector2d(x + half, y + half)};
}

/// Quadratic all-pairs overlap + independent union-find.
std::vector<std::set<Label>> oracle_groups(const std::vector<BoundingBox>& boxes) {
    std::vector<std::size_t> parent(boxes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            const bool overlap = boxes[i].lo.x() <= boxes[j].hi.x() &&
                                 boxes[j].lo.x() <= boxes[i].hi.x() &&
                                 boxes[i].lo.y() <= boxes[j].hi.y() &&
                                 boxes[j].lo.y() <= boxes[i].hi.y();
            if (overlap) parent[find(i)] = find(j);
        }
    }
    std::map<std::size_t, std::set<Label>> by_root;
    for (std::size_t i = 0; i < boxes.size(); ++i) by_root[find(i)].insert(boxes[i].label);
    std::vector<std::set<Label>> out;
    for (auto& [root, group] : by_root) out.push_back(std::move(group));
    return out;
}

std::set<std::set<Label>> as_set(const LabelPartition& p) {
    std::set<std::set<Label>> out;
    for (const auto& g : p.groups) out.insert(std::set<Label>(g.begin(), g.end()));
    return out;
}

std::set<std::set<Label>> as_set(const std::vector<std::set<Label>>& groups) {
    return {groups.begin(), groups.end()};
}

}  // namespace

TEST_CASE("project_box centers on the predicted measurement with chi-square width") {
    const Rect region{{-1000.0, -1000.0}, {1000.0, 1000.0}};
    const SensorModel s = position_sensor(0.0001, 0.9, 1.0, region);
    Eigen::VectorXd mean(4);
    mean << 5.0, -2.0, 1.0, 1.0;
    const double sigma = 3.0;
    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    cov.topLeftCorner<2, 2>() = sigma * sigma * Eigen::Matrix2d::Identity();
    cov.bottomRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
    const SingleObjectDensity d{mean, cov};

    const BoundingBox b = project_box(Label{0, 0}, d, s, 0.99);
    CHECK(b.center().isApprox(Eigen::Vector2d(5.0, -2.0), 1e-9));
    // chi-square quantile table: sqrt(chi2_0.99(2)) = 3.0348...
    const double half = 0.5 * (b.hi.x() - b.lo.x());
    CHECK(half == doctest::Approx(3.03485 * sigma).epsilon(1e-3));

    // Monotone in the gate probability.
    const BoundingBox smaller = project_box(Label{0, 0}, d, s, 0.9);
    const BoundingBox larger = project_box(Label{0, 0}, d, s, 0.999);
    CHECK(smaller.hi.x() - smaller.lo.x() < b.hi.x() - b.lo.x());
    CHECK(larger.hi.x() - larger.lo.x() > b.hi.x() - b.lo.x());
}

TEST_CASE("project_box covers at least gate_prob of simulated measurements") {
    std::mt19937_64 rng(51);
    const Rect region{{-1000.0, -1000.0}, {1000.0, 1000.0}};
    const SensorModel s = position_sensor(0.5, 0.9, 1.0, region);
    Eigen::VectorXd mean(4);
    mean << 1.0, 2.0, 0.0, 0.0;
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
    cov(0, 1) = cov(1, 0) = 0.4;
    const SingleObjectDensity d{mean, cov};
    const double gate_prob = 0.95;
    const BoundingBox b = project_box(Label{0, 0}, d, s, gate_prob);

    const Eigen::Matrix2d pos_cov = cov.topLeftCorner<2, 2>();
    const Eigen::Matrix2d innov = pos_cov + s.noise_covariance;
    const Eigen::Matrix2d chol = innov.llt().matrixL();
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 100'000;
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d z =
            mean.head<2>() + chol * Eigen::Vector2d(normal(rng), normal(rng));
        if (b.contains(z)) ++inside;
    }
    const double fraction = static_cast<double>(inside) / n;
    const double se = std::sqrt(gate_prob * (1.0 - gate_prob) / n);
    CHECK(fraction > gate_prob - 3.0 * se);
}

TEST_CASE("build_partition groups disjoint boxes as singletons") {
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < 5; ++i) boxes.push_back(box_at(i, 10.0 * i, 0.0, 1.0));
    PartitionConfig cfg;
    const PartitionResult r = build_partition(boxes, cfg);
    CHECK(r.partition.groups.size() == 5);
    CHECK(r.partition.gate_prob_used == doctest::Approx(cfg.initial_gate_prob));
    for (const auto& g : r.partition.groups) CHECK(g.size() == 1);
}

TEST_CASE("build_partition takes the transitive closure of overlaps") {
    // A overlaps B, B overlaps C, A does not overlap C.
    std::vector<BoundingBox> boxes = {box_at(0, 0.0, 0.0, 1.1), box_at(1, 2.0, 0.0, 1.1),
                                      box_at(2, 4.0, 0.0, 1.1)};
    PartitionConfig cfg;
    const PartitionResult r = build_partition(boxes, cfg);
    REQUIRE(r.partition.groups.size() == 1);
    CHECK(r.partition.groups[0].size() == 3);
}

TEST_CASE("build_partition matches the quadratic overlap oracle") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> coord(0.0, 100.0);
    std::uniform_real_distribution<double> half(0.5, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<BoundingBox> boxes;
        for (int i = 0; i < 100; ++i) boxes.push_back(box_at(i, coord(rng), coord(rng), half(rng)));
        PartitionConfig cfg;
        cfg.max_group_size = 1000;  // no backoff, pure grouping
        const PartitionResult r = build_partition(boxes, cfg);
        CHECK(as_set(r.partition) == as_set(oracle_groups(boxes)));
    }
}

TEST_CASE("build_partition is deterministic and respects the size cap") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> coord(0.0, 30.0);
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < 120; ++i) boxes.push_back(box_at(i, coord(rng), coord(rng), 2.0));
    PartitionConfig cfg;
    cfg.max_group_size = 10;
    const PartitionResult a = build_partition(boxes, cfg);
    const PartitionResult b = build_partition(boxes, cfg);
    CHECK(a.partition.groups == b.partition.groups);
    CHECK(a.partition.gate_prob_used == b.partition.gate_prob_used);

    std::set<Label> covered;
    for (const auto& g : a.partition.groups) {
        CHECK(g.size() <= cfg.max_group_size);
        for (const auto& l : g) CHECK(covered.insert(l).second);  // disjoint
    }
    CHECK(covered.size() == boxes.size());  // coverage
}

TEST_CASE("backoff shrinks boxes monotonically") {
    // Two clusters that overlap at the initial gate but separate after
    // backoff.
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < 4; ++i) boxes.push_back(box_at(i, 0.0 + 0.2 * i, 0.0, 3.0));
    for (int i = 4; i < 8; ++i) boxes.push_back(box_at(i, 8.0 + 0.2 * (i - 4), 0.0, 3.0));
    PartitionConfig cfg;
    cfg.max_group_size = 4;
    cfg.backoff_factor = 0.5;
    const PartitionResult r = build_partition(boxes, cfg);
    CHECK(r.partition.gate_prob_used < cfg.initial_gate_prob);
    CHECK(r.partition.groups.size() >= 2);
    for (const auto& g : r.partition.groups) CHECK(g.size() <= 4);
    // Final boxes are shrunk versions of the inputs.
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        CHECK(r.boxes[i].hi.x() - r.boxes[i].lo.x() <= boxes[i].hi.x() - boxes[i].lo.x() + 1e-12);
    }
}

TEST_CASE("coincident boxes are force-split within the cap") {
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < 23; ++i) boxes.push_back(box_at(i, 1.0, 1.0, 1.0));
    PartitionConfig cfg;
    cfg.max_group_size = 5;
    cfg.max_backoff_steps = 2;
    const PartitionResult r = build_partition(boxes, cfg);
    std::size_t total = 0;
    for (const auto& g : r.partition.groups) {
        CHECK(g.size() <= 5);
        total += g.size();
    }
    CHECK(total == 23);
}

TEST_CASE("route_measurements sends points to containing groups only") {
    std::vector<BoundingBox> boxes = {box_at(0, 0.0, 0.0, 1.0), box_at(1, 10.0, 0.0, 1.0)};
    PartitionConfig cfg;
    const PartitionResult r = build_partition(boxes, cfg);
    REQUIRE(r.partition.groups.size() == 2);

    const std::vector<Eigen::Vector2d> measurements = {
        {0.5, 0.5},    // inside group of label 0
        {10.0, 0.0},   // inside group of label 1
        {100.0, 100.0}  // nowhere
    };
    const RoutingResult routing = route_measurements(r.partition, r.boxes, measurements);
    CHECK(routing.per_group[0] == std::vector<int>{0});
    CHECK(routing.per_group[1] == std::vector<int>{1});
    CHECK(routing.unassigned == std::vector<int>{2});
}

TEST_CASE("route_measurements matches a brute-force point-in-box scan") {
    std::mt19937_64 rng(54);
    std::uniform_real_distribution<double> coord(0.0, 50.0);
    std::uniform_real_distribution<double> half(0.5, 4.0);
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < 60; ++i) boxes.push_back(box_at(i, coord(rng), coord(rng), half(rng)));
    PartitionConfig cfg;
    cfg.max_group_size = 1000;
    const PartitionResult r = build_partition(boxes, cfg);

    std::vector<Eigen::Vector2d> measurements;
    for (int i = 0; i < 300; ++i) measurements.emplace_back(coord(rng), coord(rng));
    const RoutingResult routing = route_measurements(r.partition, r.boxes, measurements);

    std::map<Label, std::size_t> group_of;
    for (std::size_t g = 0; g < r.partition.groups.size(); ++g) {
        for (const auto& l : r.partition.groups[g]) group_of[l] = g;
    }
    for (int j = 0; j < 300; ++j) {
        std::set<std::size_t> expected;
        for (const auto& b : r.boxes) {
            if (b.contains(measurements[j])) expected.insert(group_of.at(b.label));
        }
        std::set<std::size_t> got;
        for (std::size_t g = 0; g < routing.per_group.size(); ++g) {
            for (int idx : routing.per_group[g]) {
                if (idx == j) got.insert(g);
            }
        }
        CHECK(got == expected);
        const bool unassigned = std::find(routing.unassigned.begin(), routing.unassigned.end(),
                                          j) != routing.unassigned.end();
        CHECK(unassigned == expected.empty());
    }
}

TEST_CASE("lowering the gate probability never enlarges boxes") {
    const Rect region{{-100.0, -100.0}, {100.0, 100.0}};
    const SensorModel s = position_sensor(0.3, 0.9, 1.0, region);
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityPtr d = test::random_density(rng, 4);
        const BoundingBox hi = project_box(Label{0, 0}, *d, s, 0.999);
        const BoundingBox lo = project_box(Label{0, 0}, *d, s, 0.9);
        CHECK(lo.lo.x() >= hi.lo.x() - 1e-12);
        CHECK(lo.hi.x() <= hi.hi.x() + 1e-12);
        CHECK(lo.lo.y() >= hi.lo.y() - 1e-12);
        CHECK(lo.hi.y() <= hi.hi.y() + 1e-12);
    }
}
