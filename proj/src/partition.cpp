#include "partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace glmb {

namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using RtPoint = bg::model::point<double, 2, bg::cs::cartesian>;
using RtBox = bg::model::box<RtPoint>;
using RtValue = std::pair<RtBox, std::size_t>;
using Rtree = bgi::rtree<RtValue, bgi::rstar<16>>;

RtBox to_rt(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    return RtBox{RtPoint{lo.x(), lo.y()}, RtPoint{hi.x(), hi.y()}};
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::vector<std::vector<std::size_t>> overlap_components(const std::vector<BoundingBox>& boxes) {
    std::vector<RtValue> values;
    values.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        values.emplace_back(to_rt(boxes[i].lo, boxes[i].hi), i);
    }
    Rtree tree(values.begin(), values.end());

    UnionFind uf(boxes.size());
    std::vector<RtValue> hits;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        hits.clear();
        tree.query(bgi::intersects(values[i].first), std::back_inserter(hits));
        for (const auto& hit : hits) {
            if (hit.second > i) uf.unite(i, hit.second);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < boxes.size(); ++i) by_root[uf.find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    out.reserve(by_root.size());
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;
}

std::vector<BoundingBox> rescale_boxes(const std::vector<BoundingBox>& boxes, double factor) {
    std::vector<BoundingBox> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes) {
        const Eigen::Vector2d c = b.center();
        const Eigen::Vector2d hw = factor * 0.5 * (b.hi - b.lo);
        out.push_back(BoundingBox{b.label, c - hw, c + hw});
    }
    return out;
}

/// Lloyd k-means over box centers, seeded from evenly spaced members in label
/// order. Any cluster still above the cap afterwards is chunked in label
/// order, so the split always terminates within the cap.
std::vector<std::vector<std::size_t>> forced_split(const std::vector<BoundingBox>& boxes,
                                                   const std::vector<std::size_t>& members,
                                                   std::size_t cap) {
    const std::size_t k = (members.size() + cap - 1) / cap;
    std::vector<Eigen::Vector2d> centers(k);
    for (std::size_t c = 0; c < k; ++c) {
        centers[c] = boxes[members[c * members.size() / k]].center();
    }

    std::vector<std::size_t> cluster_of(members.size(), 0);
    for (int iter = 0; iter < 25; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const Eigen::Vector2d p = boxes[members[i]].center();
            std::size_t best = 0;
            double best_d = (p - centers[0]).squaredNorm();
            for (std::size_t c = 1; c < k; ++c) {
                const double d = (p - centers[c]).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (cluster_of[i] != best) {
                cluster_of[i] = best;
                changed = true;
            }
        }
        std::vector<Eigen::Vector2d> sums(k, Eigen::Vector2d::Zero());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < members.size(); ++i) {
            sums[cluster_of[i]] += boxes[members[i]].center();
            counts[cluster_of[i]] += 1;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) centers[c] = sums[c] / static_cast<double>(counts[c]);
        }
        if (!changed) break;
    }

    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < members.size(); ++i) {
        clusters[cluster_of[i]].push_back(members[i]);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& cluster : clusters) {
        if (cluster.empty()) continue;
        for (std::size_t start = 0; start < cluster.size(); start += cap) {
            const std::size_t end = std::min(start + cap, cluster.size());
            out.emplace_back(cluster.begin() + start, cluster.begin() + end);
        }
    }
    return out;
}

}  // namespace

double chi_squared_quantile(double prob, int dim) {
    boost::math::chi_squared_distribution<double> dist(dim);
    return boost::math::quantile(dist, prob);
}

BoundingBox project_box(const Label& label, const SingleObjectDensity& marginal,
                        const SensorModel& sensor, double gate_prob) {
    const Eigen::MatrixXd& H = sensor.observation;
    const Eigen::Vector2d predicted = H * marginal.mean;
    const Eigen::MatrixXd innovation_cov =
        H * marginal.covariance * H.transpose() + sensor.noise_covariance;
    const double radius = std::sqrt(chi_squared_quantile(gate_prob, 2));
    Eigen::Vector2d half_width;
    for (int i = 0; i < 2; ++i) half_width(i) = radius * std::sqrt(innovation_cov(i, i));
    return BoundingBox{label, predicted - half_width, predicted + half_width};
}

PartitionResult build_partition(const std::vector<BoundingBox>& boxes,
                                const PartitionConfig& cfg) {
    const double initial_q = chi_squared_quantile(cfg.initial_gate_prob, 2);

    double gate_prob = cfg.initial_gate_prob;
    std::vector<BoundingBox> scaled = boxes;
    std::vector<std::vector<std::size_t>> components;
    for (std::size_t attempt = 0; attempt <= cfg.max_backoff_steps; ++attempt) {
        if (attempt > 0) {
            gate_prob *= cfg.backoff_factor;
            scaled = rescale_boxes(boxes,
                                   std::sqrt(chi_squared_quantile(gate_prob, 2) / initial_q));
        }
        components = overlap_components(scaled);
        const bool oversized =
            std::any_of(components.begin(), components.end(),
                        [&](const auto& g) { return g.size() > cfg.max_group_size; });
        if (!oversized) break;
    }

    std::vector<std::vector<std::size_t>> final_groups;
    for (auto& comp : components) {
        if (comp.size() <= cfg.max_group_size) {
            final_groups.push_back(std::move(comp));
        } else {
            for (auto& piece : forced_split(scaled, comp, cfg.max_group_size)) {
                final_groups.push_back(std::move(piece));
            }
        }
    }

    PartitionResult out;
    out.partition.gate_prob_used = gate_prob;
    out.boxes = std::move(scaled);
    for (auto& group : final_groups) {
        std::vector<Label> labels;
        labels.reserve(group.size());
        for (std::size_t i : group) labels.push_back(out.boxes[i].label);
        std::sort(labels.begin(), labels.end());
        out.partition.groups.push_back(std::move(labels));
    }
    std::sort(out.partition.groups.begin(), out.partition.groups.end());
    return out;
}

RoutingResult route_measurements(const LabelPartition& partition,
                                 const std::vector<BoundingBox>& boxes,
                                 const std::vector<Eigen::Vector2d>& measurements) {
    std::map<Label, std::size_t> group_of;
    for (std::size_t g = 0; g < partition.groups.size(); ++g) {
        for (const auto& l : partition.groups[g]) group_of.emplace(l, g);
    }

    std::vector<RtValue> values;
    values.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        values.emplace_back(to_rt(boxes[i].lo, boxes[i].hi), group_of.at(boxes[i].label));
    }
    Rtree tree(values.begin(), values.end());

    RoutingResult out;
    out.per_group.assign(partition.groups.size(), {});
    std::vector<RtValue> hits;
    std::vector<std::size_t> groups_hit;
    for (std::size_t j = 0; j < measurements.size(); ++j) {
        hits.clear();
        groups_hit.clear();
        // Degenerate box: closed-interval point containment.
        tree.query(bgi::intersects(to_rt(measurements[j], measurements[j])),
                   std::back_inserter(hits));
        for (const auto& hit : hits) groups_hit.push_back(hit.second);
        std::sort(groups_hit.begin(), groups_hit.end());
        groups_hit.erase(std::unique(groups_hit.begin(), groups_hit.end()), groups_hit.end());
        if (groups_hit.empty()) {
            out.unassigned.push_back(static_cast<int>(j));
        } else {
            for (std::size_t g : groups_hit) out.per_group[g].push_back(static_cast<int>(j));
        }
    }
    return out;
}

}  // namespace glmb
