#include "runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "track_io.hpp"

namespace glmb {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw GlmbError(ErrorCode::IoFailure, "cannot create '" + dir + "'");
}

struct TimeExtent {
    int begin = std::numeric_limits<int>::max();
    int end = std::numeric_limits<int>::min();

    void absorb(const std::vector<Track>& tracks) {
        for (const auto& t : tracks) {
            if (t.empty()) continue;
            begin = std::min(begin, t.first_time());
            end = std::max(end, t.last_time());
        }
    }
    [[nodiscard]] bool empty() const { return begin > end; }
};

std::size_t live_count(const std::vector<Track>& tracks, int k) {
    std::size_t n = 0;
    for (const auto& t : tracks) n += t.states.count(k);
    return n;
}

}  // namespace

void run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::vector<Track> truth = generate_truth(cfg.scenario);
    const std::vector<ScanData> scans = generate_measurements(truth, cfg.scenario);
    write_tracks(join(out_dir, "truth.tracks"), truth);
    write_scans(join(out_dir, "scans.jsonl"), scans);
}

void run_track(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::vector<ScanData> scans = read_scans(join(out_dir, "scans.jsonl"));
    const RunResult result = run(scans, cfg.tracker_config());
    write_tracks(join(out_dir, "est.tracks"), result.tracks);
    write_diagnostics_csv(join(out_dir, "diag.csv"), result.diagnostics);
}

void run_evaluate(const std::string& truth_path, const std::string& est_path,
                  const EvaluateOptions& options, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::vector<Track> truth = read_tracks(truth_path);
    const std::vector<Track> est = read_tracks(est_path);

    TimeExtent extent;
    extent.absorb(truth);
    extent.absorb(est);
    if (extent.empty()) {
        throw GlmbError(ErrorCode::ConfigInvalid, "no track states to evaluate");
    }

    MetricConfig metric;
    metric.cutoff = options.cutoff;
    metric.order = options.order;
    WindowSpec window{options.window, 1};
    const auto series =
        ospa2_windowed(truth, est, metric, window, extent.begin, extent.end,
                       MetricPipeline::kSparse, options.threads);
    write_series_csv(join(out_dir, "ospa2.csv"), "scan", "ospa2", series);
    if (options.window == 1) {
        write_series_csv(join(out_dir, "ospa.csv"), "scan", "ospa", series);
    }
}

void run_report(const std::string& diag_csv, const std::string& ospa2_csv,
                const std::string& truth_path, const std::string& est_path,
                const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::vector<Track> truth = read_tracks(truth_path);
    const std::vector<Track> est = read_tracks(est_path);
    const auto ospa2_series = read_series_csv(ospa2_csv);
    if (truth.empty() || ospa2_series.empty()) {
        throw GlmbError(ErrorCode::ConfigInvalid, "report needs non-empty truth and metric series");
    }
    std::ifstream diag_in(diag_csv);
    if (!diag_in) throw GlmbError(ErrorCode::IoFailure, "cannot read '" + diag_csv + "'");

    TimeExtent extent;
    extent.absorb(truth);
    extent.absorb(est);

    // Cardinality curves.
    std::vector<std::pair<int, double>> true_card, est_card;
    std::size_t peak_truth = 0, peak_est = 0;
    for (int k = extent.begin; k <= extent.end; ++k) {
        const std::size_t nt = live_count(truth, k);
        const std::size_t ne = live_count(est, k);
        peak_truth = std::max(peak_truth, nt);
        peak_est = std::max(peak_est, ne);
        true_card.emplace_back(k, static_cast<double>(nt));
        est_card.emplace_back(k, static_cast<double>(ne));
    }
    {
        std::ofstream out(join(out_dir, "cardinality.csv"));
        if (!out) throw GlmbError(ErrorCode::IoFailure, "cannot write cardinality.csv");
        out << "scan,truth,estimate\n";
        for (std::size_t i = 0; i < true_card.size(); ++i) {
            out << true_card[i].first << "," << static_cast<std::size_t>(true_card[i].second)
                << "," << static_cast<std::size_t>(est_card[i].second) << "\n";
        }
    }

    // Gridded position densities at six snapshot scans.
    Eigen::Vector2d lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Eigen::Vector2d hi = -lo;
    for (const auto& t : truth) {
        for (const auto& [time, s] : t.states) {
            lo = lo.cwiseMin(s.head<2>());
            hi = hi.cwiseMax(s.head<2>());
        }
    }
    const int nx = 32, ny = 18;
    const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-9);
    {
        std::ofstream out(join(out_dir, "density.csv"));
        if (!out) throw GlmbError(ErrorCode::IoFailure, "cannot write density.csv");
        out << "scan,x_bin,y_bin,truth,estimate\n";
        for (int snap = 0; snap < 6; ++snap) {
            const int k =
                extent.begin + (extent.end - extent.begin) * (snap + 1) / 6;
            std::vector<int> truth_grid(nx * ny, 0), est_grid(nx * ny, 0);
            auto accumulate = [&](const std::vector<Track>& tracks, std::vector<int>& grid) {
                for (const auto& t : tracks) {
                    const auto it = t.states.find(k);
                    if (it == t.states.end()) continue;
                    const Eigen::Vector2d p = it->second.head<2>();
                    const int ix = std::clamp(
                        static_cast<int>((p.x() - lo.x()) / span.x() * nx), 0, nx - 1);
                    const int iy = std::clamp(
                        static_cast<int>((p.y() - lo.y()) / span.y() * ny), 0, ny - 1);
                    grid[iy * nx + ix] += 1;
                }
            };
            accumulate(truth, truth_grid);
            accumulate(est, est_grid);
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) {
                    out << k << "," << ix << "," << iy << "," << truth_grid[iy * nx + ix] << ","
                        << est_grid[iy * nx + ix] << "\n";
                }
            }
        }
    }

    // Plain-text summary.
    double ospa2_tail = 0.0;
    std::size_t tail_count = 0;
    for (std::size_t i = ospa2_series.size() - ospa2_series.size() / 4; i < ospa2_series.size();
         ++i) {
        ospa2_tail += ospa2_series[i].second;
        ++tail_count;
    }
    std::size_t diag_lines = 0;
    std::string line;
    std::getline(diag_in, line);  // header
    while (std::getline(diag_in, line)) {
        if (!line.empty()) ++diag_lines;
    }
    std::ofstream out(join(out_dir, "summary.txt"));
    if (!out) throw GlmbError(ErrorCode::IoFailure, "cannot write summary.txt");
    char buf[128];
    out << "scans processed:        " << diag_lines << "\n";
    out << "time extent:            [" << extent.begin << ", " << extent.end << "]\n";
    out << "true tracks:            " << truth.size() << "\n";
    out << "estimated tracks:       " << est.size() << "\n";
    out << "peak true cardinality:  " << peak_truth << "\n";
    out << "peak est. cardinality:  " << peak_est << "\n";
    std::snprintf(buf, sizeof(buf), "%.6g", ospa2_series.back().second);
    out << "final ospa2:            " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6g",
                  tail_count > 0 ? ospa2_tail / static_cast<double>(tail_count) : 0.0);
    out << "mean ospa2 (last 25%):  " << buf << "\n";
}

}  // namespace glmb
