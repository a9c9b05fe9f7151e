#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace glmb {

/// A track is a partial function from time indices to state vectors.
struct Track {
    std::string id;
    std::map<int, Eigen::VectorXd> states;

    [[nodiscard]] bool empty() const { return states.empty(); }
    [[nodiscard]] int first_time() const { return states.begin()->first; }
    [[nodiscard]] int last_time() const { return states.rbegin()->first; }

    /// Restriction to the time window [t0, t1].
    [[nodiscard]] Track restrict_to(int t0, int t1) const;
};

struct MetricConfig {
    double cutoff = 2.0;  // c, meters
    double order = 1.0;   // p >= 1
    // Base distance defaults to Euclidean on the position components; the
    // full state vector can be used instead.
    bool full_state = false;
};

struct WindowSpec {
    int length = 50;
    int stride = 1;
};

enum class MetricPipeline { kDense, kSparse };

/// OSPA distance between two finite sets of states with cutoff c and order p;
/// zero for two empty sets.
double ospa(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y,
            const MetricConfig& cfg);

/// Time-averaged OSPA between two tracks over the union of their domains:
/// per instant, 0 if both absent, c if exactly one exists, min(c, d) if both
/// exist. Zero when both domains are empty. The result never exceeds c.
double track_distance(const Track& x, const Track& y, double cutoff, bool full_state = false);

/// OSPA over sets of tracks with track_distance as base distance
/// (time-averaged per-track error). Dense evaluation.
double ospa2(const std::vector<Track>& x, const std::vector<Track>& y, const MetricConfig& cfg);

/// Same value via the sparse pipeline: assignable_pairs + sparse_assignment.
double ospa2_sparse(const std::vector<Track>& x, const std::vector<Track>& y,
                    const MetricConfig& cfg);

/// Sliding-window series: for each k in [horizon_begin, horizon_end] stepped
/// by window.stride, restricts every track to {k-length+1, ..., k}, drops
/// tracks with empty restriction, and evaluates OSPA(2).
std::vector<std::pair<int, double>> ospa2_windowed(
    const std::vector<Track>& x, const std::vector<Track>& y, const MetricConfig& cfg,
    const WindowSpec& window, int horizon_begin, int horizon_end,
    MetricPipeline pipeline = MetricPipeline::kSparse, int threads = 1);

struct AssignablePair {
    int i = 0;
    int j = 0;
    double distance = 0.0;  // track base distance, < cutoff
};

/// Exactly the track pairs whose base distance is below the cutoff, found by
/// an R-tree query over per-track space-time boxes inflated by c/2; every
/// omitted pair provably saturates at c.
std::vector<AssignablePair> assignable_pairs(const std::vector<Track>& x,
                                             const std::vector<Track>& y, double cutoff,
                                             bool full_state = false);

/// Inner minimization of the track OSPA: minimum total cost of a one-to-one
/// matching where every unmatched row/column implicitly costs c^p. Exact
/// optimum via shortest augmenting paths on the sparse graph with one virtual
/// saturation arc per row. Requires m <= n.
double sparse_assignment(const std::vector<AssignablePair>& pairs, std::size_t m, std::size_t n,
                         double cutoff, double order);

/// Exact minimum-cost assignment of all rows of a cost matrix (rows <= cols)
/// by shortest augmenting paths with potentials.
double dense_assignment_cost(const Eigen::MatrixXd& cost);

}  // namespace glmb
