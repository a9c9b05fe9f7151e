#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "parallel.hpp"

namespace glmb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double state_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool full_state) {
    if (full_state) return (a - b).norm();
    return (a.head<2>() - b.head<2>()).norm();
}

}  // namespace

Track Track::restrict_to(int t0, int t1) const {
    Track out;
    out.id = id;
    for (auto it = states.lower_bound(t0); it != states.end() && it->first <= t1; ++it) {
        out.states.emplace(it->first, it->second);
    }
    return out;
}

double dense_assignment_cost(const Eigen::MatrixXd& cost) {
    const int m = static_cast<int>(cost.rows());
    const int n = static_cast<int>(cost.cols());
    if (m == 0) return 0.0;

    // Shortest augmenting path with potentials, 1-indexed with a virtual
    // column 0 (Jonker-Volgenant style).
    std::vector<double> u(m + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> assigned(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= m; ++i) {
        assigned[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = assigned[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[assigned[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (assigned[j0] != 0);
        do {
            const int j1 = way[j0];
            assigned[j0] = assigned[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (assigned[j] != 0) total += cost(assigned[j] - 1, j - 1);
    }
    return total;
}

namespace {

double ospa_from_cost(const Eigen::MatrixXd& cost, std::size_t m, std::size_t n, double c,
                      double p) {
    const double matched = dense_assignment_cost(cost);
    const double total = matched + std::pow(c, p) * static_cast<double>(n - m);
    return std::pow(total / static_cast<double>(n), 1.0 / p);
}

}  // namespace

double ospa(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y,
            const MetricConfig& cfg) {
    if (x.empty() && y.empty()) return 0.0;
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& big = x.size() <= y.size() ? y : x;
    const std::size_t m = small.size();
    const std::size_t n = big.size();
    if (m == 0) return cfg.cutoff;

    Eigen::MatrixXd cost(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::min(cfg.cutoff, state_distance(small[i], big[j], cfg.full_state));
            cost(i, j) = std::pow(d, cfg.order);
        }
    }
    return ospa_from_cost(cost, m, n, cfg.cutoff, cfg.order);
}

double track_distance(const Track& x, const Track& y, double cutoff, bool full_state) {
    auto ix = x.states.begin();
    auto iy = y.states.begin();
    double sum = 0.0;
    std::size_t count = 0;
    while (ix != x.states.end() || iy != y.states.end()) {
        ++count;
        if (iy == y.states.end() || (ix != x.states.end() && ix->first < iy->first)) {
            sum += cutoff;  // only x exists here
            ++ix;
        } else if (ix == x.states.end() || iy->first < ix->first) {
            sum += cutoff;  // only y exists here
            ++iy;
        } else {
            sum += std::min(cutoff, state_distance(ix->second, iy->second, full_state));
            ++ix;
            ++iy;
        }
    }
    if (count == 0) return 0.0;
    return sum / static_cast<double>(count);
}

double ospa2(const std::vector<Track>& x, const std::vector<Track>& y, const MetricConfig& cfg) {
    if (x.empty() && y.empty()) return 0.0;
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& big = x.size() <= y.size() ? y : x;
    const std::size_t m = small.size();
    const std::size_t n = big.size();
    if (m == 0) return cfg.cutoff;

    Eigen::MatrixXd cost(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost(i, j) =
                std::pow(track_distance(small[i], big[j], cfg.cutoff, cfg.full_state), cfg.order);
        }
    }
    return ospa_from_cost(cost, m, n, cfg.cutoff, cfg.order);
}

// ---- Sparse pipeline ----

namespace {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using Point3 = bg::model::point<double, 3, bg::cs::cartesian>;
using Box3 = bg::model::box<Point3>;
using Value3 = std::pair<Box3, std::size_t>;

/// Space-time bounding box of a track's positions, spatially inflated by
/// `pad`.
Box3 track_box(const Track& t, double pad) {
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto& [time, s] : t.states) {
        xmin = std::min(xmin, s(0));
        xmax = std::max(xmax, s(0));
        ymin = std::min(ymin, s(1));
        ymax = std::max(ymax, s(1));
    }
    return Box3{Point3{xmin - pad, ymin - pad, static_cast<double>(t.first_time())},
                Point3{xmax + pad, ymax + pad, static_cast<double>(t.last_time())}};
}

}  // namespace

std::vector<AssignablePair> assignable_pairs(const std::vector<Track>& x,
                                             const std::vector<Track>& y, double cutoff,
                                             bool full_state) {
    std::vector<AssignablePair> out;
    std::vector<Value3> values;
    values.reserve(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j].empty()) continue;
        values.emplace_back(track_box(y[j], 0.5 * cutoff), j);
    }
    bgi::rtree<Value3, bgi::rstar<16>> tree(values.begin(), values.end());

    std::vector<Value3> hits;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].empty()) continue;
        hits.clear();
        tree.query(bgi::intersects(track_box(x[i], 0.5 * cutoff)), std::back_inserter(hits));
        std::sort(hits.begin(), hits.end(),
                  [](const Value3& a, const Value3& b) { return a.second < b.second; });
        for (const auto& hit : hits) {
            const std::size_t j = hit.second;
            const double d = track_distance(x[i], y[j], cutoff, full_state);
            if (d < cutoff) {
                out.push_back(AssignablePair{static_cast<int>(i), static_cast<int>(j), d});
            }
        }
    }
    return out;
}

double sparse_assignment(const std::vector<AssignablePair>& pairs, std::size_t m, std::size_t n,
                         double cutoff, double order) {
    const double saturation = std::pow(cutoff, order);
    if (m == 0) return saturation * static_cast<double>(n);

    // Columns 0..n-1 are real, n..n+m-1 are per-row saturation arcs; a full
    // row matching on this graph realizes the optimal partial matching with
    // cutoff penalties.
    const std::size_t cols = n + m;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(m);
    for (const auto& p : pairs) {
        adj[p.i].emplace_back(static_cast<std::size_t>(p.j), std::pow(p.distance, order));
    }
    for (std::size_t i = 0; i < m; ++i) adj[i].emplace_back(n + i, saturation);

    std::vector<double> u(m, 0.0), v(cols, 0.0);
    std::vector<int> match_row(m, -1), match_col(cols, -1);

    std::vector<double> dist(cols, kInf);
    std::vector<int> prev_row(cols, -1);
    std::vector<unsigned> stamp(cols, 0);
    std::vector<unsigned> done_stamp(cols, 0);
    unsigned round = 0;

    using HeapItem = std::pair<double, std::size_t>;  // (dist, col)
    for (std::size_t source = 0; source < m; ++source) {
        ++round;
        std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

        auto relax = [&](std::size_t row, double base) {
            for (const auto& [col, cost] : adj[row]) {
                const double nd = base + cost - u[row] - v[col];
                if (stamp[col] != round) {
                    stamp[col] = round;
                    dist[col] = kInf;
                    prev_row[col] = -1;
                }
                if (nd < dist[col]) {
                    dist[col] = nd;
                    prev_row[col] = static_cast<int>(row);
                    heap.emplace(nd, col);
                }
            }
        };
        relax(source, 0.0);

        long long end_col = -1;
        double end_dist = 0.0;
        std::vector<std::size_t> popped;
        while (!heap.empty()) {
            const auto [d, col] = heap.top();
            heap.pop();
            if (stamp[col] != round || d > dist[col]) continue;
            if (done_stamp[col] == round) continue;
            done_stamp[col] = round;
            popped.push_back(col);
            if (match_col[col] < 0) {
                end_col = static_cast<long long>(col);
                end_dist = d;
                break;
            }
            relax(static_cast<std::size_t>(match_col[col]), d);
        }

        // Every row always has its saturation arc, so a path exists.
        // Update potentials over the Dijkstra cloud.
        for (std::size_t col : popped) {
            if (static_cast<long long>(col) == end_col) continue;
            v[col] += dist[col] - end_dist;
            if (match_col[col] >= 0) {
                u[match_col[col]] += end_dist - dist[col];
            }
        }
        u[source] += end_dist;

        // Augment along parent pointers.
        long long col = end_col;
        while (col >= 0) {
            const int row = prev_row[col];
            const int next_col = match_row[row];
            match_row[row] = static_cast<int>(col);
            match_col[col] = row;
            col = next_col;
        }
    }

    double total = saturation * static_cast<double>(n - m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t col = static_cast<std::size_t>(match_row[i]);
        if (col >= n) {
            total += saturation;
        } else {
            double cost = saturation;
            for (const auto& [c, w] : adj[i]) {
                if (c == col) {
                    cost = w;
                    break;
                }
            }
            total += cost;
        }
    }
    return total;
}

double ospa2_sparse(const std::vector<Track>& x, const std::vector<Track>& y,
                    const MetricConfig& cfg) {
    if (x.empty() && y.empty()) return 0.0;
    const bool swap = x.size() > y.size();
    const auto& small = swap ? y : x;
    const auto& big = swap ? x : y;
    if (small.empty()) return cfg.cutoff;

    std::vector<AssignablePair> pairs = assignable_pairs(small, big, cfg.cutoff, cfg.full_state);
    const double total =
        sparse_assignment(pairs, small.size(), big.size(), cfg.cutoff, cfg.order);
    return std::pow(total / static_cast<double>(big.size()), 1.0 / cfg.order);
}

std::vector<std::pair<int, double>> ospa2_windowed(const std::vector<Track>& x,
                                                   const std::vector<Track>& y,
                                                   const MetricConfig& cfg,
                                                   const WindowSpec& window, int horizon_begin,
                                                   int horizon_end, MetricPipeline pipeline,
                                                   int threads) {
    std::vector<int> ks;
    for (int k = horizon_begin; k <= horizon_end; k += std::max(1, window.stride)) {
        ks.push_back(k);
    }
    std::vector<std::pair<int, double>> out(ks.size());

    parallel_for(ks.size(), resolve_threads(threads), [&](std::size_t idx) {
        const int k = ks[idx];
        const int t0 = k - window.length + 1;
        std::vector<Track> xs, ys;
        for (const auto& t : x) {
            Track r = t.restrict_to(t0, k);
            if (!r.empty()) xs.push_back(std::move(r));
        }
        for (const auto& t : y) {
            Track r = t.restrict_to(t0, k);
            if (!r.empty()) ys.push_back(std::move(r));
        }
        const double value = pipeline == MetricPipeline::kDense ? ospa2(xs, ys, cfg)
                                                                : ospa2_sparse(xs, ys, cfg);
        out[idx] = {k, value};
    });
    return out;
}

}  // namespace glmb
