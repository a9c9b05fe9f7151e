#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"

namespace glmb {

namespace {

/// Wishart(V, dof) sample via the Bartlett decomposition.
Eigen::Matrix2d sample_wishart(const Eigen::Matrix2d& scale, int dof, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 2; ++i) {
        std::gamma_distribution<double> gamma(0.5 * (dof - i), 2.0);
        a(i, i) = std::sqrt(gamma(rng));
    }
    a(1, 0) = normal(rng);
    const Eigen::Matrix2d l = scale.llt().matrixL();
    const Eigen::Matrix2d la = l * a;
    return la * la.transpose();
}

Eigen::Matrix2d sample_inverse_wishart(const Eigen::Matrix2d& scale, int dof,
                                       std::mt19937_64& rng) {
    return sample_wishart(scale.inverse(), dof, rng).inverse();
}

struct BirthMixture {
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> cov_chol;
};

BirthMixture make_mixture(const ScenarioConfig& cfg, std::mt19937_64& rng) {
    // Means uniform over the inner region, proportioned like the reference
    // scenario (1/16 and 1/9 margins).
    const Eigen::Vector2d span = cfg.region.hi - cfg.region.lo;
    const Eigen::Vector2d lo = cfg.region.lo + Eigen::Vector2d(span.x() / 16.0, span.y() / 9.0);
    const Eigen::Vector2d hi =
        cfg.region.lo + Eigen::Vector2d(span.x() * 15.0 / 16.0, span.y() * 8.0 / 9.0);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x());
    std::uniform_real_distribution<double> uy(lo.y(), hi.y());

    BirthMixture mix;
    for (int i = 0; i < cfg.mixture_components; ++i) {
        mix.means.emplace_back(ux(rng), uy(rng));
        const Eigen::Matrix2d cov = sample_inverse_wishart(cfg.mixture_scale, cfg.wishart_dof, rng);
        mix.cov_chol.push_back(cov.llt().matrixL());
    }
    return mix;
}

Eigen::Vector2d sample_birth_position(const BirthMixture& mix, const Rect& region,
                                      std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, mix.means.size() - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::size_t c = pick(rng);
        const Eigen::Vector2d z(normal(rng), normal(rng));
        const Eigen::Vector2d pos = mix.means[c] + mix.cov_chol[c] * z;
        if (region.contains(pos)) return pos;
    }
    return region.clamp(mix.means[pick(rng)]);
}

}  // namespace

std::vector<Track> generate_truth(const ScenarioConfig& cfg) {
    std::mt19937_64 mixture_rng(derive_seed(cfg.rng_seed, "sim.mixture", 0, 0));
    const BirthMixture mix = make_mixture(cfg, mixture_rng);

    std::mt19937_64 rng(derive_seed(cfg.rng_seed, "sim.truth", 0, 0));
    std::uniform_real_distribution<double> course(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> speed(cfg.speed_range.first, cfg.speed_range.second);
    std::uniform_int_distribution<int> lifetime(cfg.lifetime_range.first,
                                                cfg.lifetime_range.second);

    std::vector<Track> tracks;
    int next_id = 0;
    for (int k = 0; k < cfg.duration; ++k) {
        for (const auto& w : cfg.birth_windows) {
            if (k < w.start || k >= w.end || w.rate <= 0.0) continue;
            std::poisson_distribution<int> births(w.rate);
            const int n = births(rng);
            for (int b = 0; b < n; ++b) {
                const Eigen::Vector2d pos = sample_birth_position(mix, cfg.region, rng);
                const double theta = course(rng);
                const double v = speed(rng);
                const int life = lifetime(rng);

                Track t;
                t.id = "T" + std::to_string(next_id++);
                Eigen::VectorXd state(4);
                state << pos.x(), pos.y(), v * std::cos(theta), v * std::sin(theta);
                for (int age = 0; age < life && k + age < cfg.duration; ++age) {
                    if (!cfg.region.contains(state.head<2>())) break;
                    t.states.emplace(k + age, state);
                    state(0) += state(2);
                    state(1) += state(3);
                }
                if (!t.empty()) tracks.push_back(std::move(t));
            }
        }
    }
    return tracks;
}

std::vector<ScanData> generate_measurements(const std::vector<Track>& truth,
                                            const ScenarioConfig& cfg) {
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, "sim.meas", 0, 0));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, cfg.meas_noise_sigma);
    std::uniform_real_distribution<double> cx(cfg.region.lo.x(), cfg.region.hi.x());
    std::uniform_real_distribution<double> cy(cfg.region.lo.y(), cfg.region.hi.y());
    std::poisson_distribution<int> clutter(cfg.clutter_rate);

    std::vector<ScanData> scans(cfg.duration);
    for (int k = 0; k < cfg.duration; ++k) {
        ScanData& scan = scans[k];
        scan.scan = k;
        for (const auto& t : truth) {
            const auto it = t.states.find(k);
            if (it == t.states.end()) continue;
            if (unif(rng) > cfg.detection_prob) continue;
            Eigen::Vector2d z = it->second.head<2>() + Eigen::Vector2d(noise(rng), noise(rng));
            scan.measurements.push_back(cfg.region.clamp(z));
        }
        const int n_clutter = cfg.clutter_rate > 0.0 ? clutter(rng) : 0;
        for (int i = 0; i < n_clutter; ++i) {
            scan.measurements.emplace_back(cx(rng), cy(rng));
        }
        std::shuffle(scan.measurements.begin(), scan.measurements.end(), rng);
    }
    return scans;
}

}  // namespace glmb
