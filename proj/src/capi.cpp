#include "glmb/glmb.h"

#include <cstring>
#include <string>

#include "engine.hpp"
#include "run_config.hpp"
#include "runner.hpp"
#include "track_io.hpp"

namespace {

thread_local std::string g_last_error;

glmb_status status_of(const glmb::GlmbError& e) {
    switch (e.code()) {
        case glmb::ErrorCode::ConfigInvalid:
            return GLMB_ERR_CONFIG;
        case glmb::ErrorCode::IoFailure:
            return GLMB_ERR_IO;
        default:
            return GLMB_ERR_RUNTIME;
    }
}

template <typename Fn>
glmb_status guarded(Fn&& fn) {
    try {
        fn();
        return GLMB_OK;
    } catch (const glmb::GlmbError& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GLMB_ERR_RUNTIME;
    }
}

glmb_status invalid(const char* message) {
    g_last_error = message;
    return GLMB_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct glmb_config {
    glmb::RunConfig cfg;
};

struct glmb_tracker {
    glmb::TrackerConfig cfg;
    glmb::TrackerState state;
};

extern "C" {

const char* glmb_version(void) { return "1.0.0"; }

const char* glmb_last_error(void) { return g_last_error.c_str(); }

glmb_status glmb_config_default(glmb_config** out) {
    if (out == nullptr) return invalid("out is NULL");
    return guarded([&] { *out = new glmb_config{glmb::default_run_config()}; });
}

glmb_status glmb_config_load(const char* path, glmb_config** out) {
    if (path == nullptr || out == nullptr) return invalid("path/out is NULL");
    return guarded([&] { *out = new glmb_config{glmb::load_run_config(path)}; });
}

glmb_status glmb_config_parse(const char* json_text, glmb_config** out) {
    if (json_text == nullptr || out == nullptr) return invalid("json_text/out is NULL");
    return guarded([&] { *out = new glmb_config{glmb::parse_run_config(json_text)}; });
}

void glmb_config_free(glmb_config* cfg) { delete cfg; }

glmb_status glmb_config_set_seed(glmb_config* cfg, uint64_t seed) {
    if (cfg == nullptr) return invalid("cfg is NULL");
    cfg->cfg.seed = seed;
    cfg->cfg.scenario.rng_seed = seed;
    return GLMB_OK;
}

glmb_status glmb_config_set_threads(glmb_config* cfg, int threads) {
    if (cfg == nullptr) return invalid("cfg is NULL");
    if (threads < 0) return invalid("threads must be >= 0");
    cfg->cfg.threads = threads;
    return GLMB_OK;
}

glmb_status glmb_config_output_dir(const glmb_config* cfg, char* buffer, size_t size) {
    if (cfg == nullptr || buffer == nullptr || size == 0) return invalid("bad buffer");
    const std::string& dir = cfg->cfg.output_dir;
    if (dir.size() + 1 > size) return invalid("buffer too small");
    std::memcpy(buffer, dir.c_str(), dir.size() + 1);
    return GLMB_OK;
}

glmb_status glmb_simulate(const glmb_config* cfg, const char* out_dir) {
    if (cfg == nullptr || out_dir == nullptr) return invalid("cfg/out_dir is NULL");
    return guarded([&] { glmb::run_simulate(cfg->cfg, out_dir); });
}

glmb_status glmb_track(const glmb_config* cfg, const char* out_dir) {
    if (cfg == nullptr || out_dir == nullptr) return invalid("cfg/out_dir is NULL");
    return guarded([&] { glmb::run_track(cfg->cfg, out_dir); });
}

glmb_status glmb_evaluate(const char* truth_path, const char* est_path, double cutoff,
                          double order, int window, int threads, const char* out_dir) {
    if (truth_path == nullptr || est_path == nullptr || out_dir == nullptr) {
        return invalid("paths must not be NULL");
    }
    if (cutoff <= 0.0 || order < 1.0 || window < 1 || threads < 0) {
        return invalid("cutoff > 0, order >= 1, window >= 1, threads >= 0 required");
    }
    return guarded([&] {
        glmb::EvaluateOptions options;
        options.cutoff = cutoff;
        options.order = order;
        options.window = window;
        options.threads = threads;
        glmb::run_evaluate(truth_path, est_path, options, out_dir);
    });
}

glmb_status glmb_report(const char* diag_csv, const char* ospa2_csv, const char* truth_path,
                        const char* est_path, const char* out_dir) {
    if (diag_csv == nullptr || ospa2_csv == nullptr || truth_path == nullptr ||
        est_path == nullptr || out_dir == nullptr) {
        return invalid("paths must not be NULL");
    }
    return guarded([&] { glmb::run_report(diag_csv, ospa2_csv, truth_path, est_path, out_dir); });
}

glmb_status glmb_tracker_create(const glmb_config* cfg, glmb_tracker** out) {
    if (cfg == nullptr || out == nullptr) return invalid("cfg/out is NULL");
    return guarded([&] { *out = new glmb_tracker{cfg->cfg.tracker_config(), {}}; });
}

void glmb_tracker_free(glmb_tracker* tracker) { delete tracker; }

glmb_status glmb_tracker_step(glmb_tracker* tracker, const double* xy, size_t n) {
    if (tracker == nullptr) return invalid("tracker is NULL");
    if (n > 0 && xy == nullptr) return invalid("xy is NULL");
    return guarded([&] {
        glmb::ScanData scan;
        scan.scan = tracker->state.scan + 1;
        scan.measurements.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            scan.measurements.emplace_back(xy[2 * i], xy[2 * i + 1]);
        }
        tracker->state = glmb::step(std::move(tracker->state), scan, tracker->cfg);
    });
}

glmb_status glmb_tracker_estimate_count(const glmb_tracker* tracker, size_t* n) {
    if (tracker == nullptr || n == nullptr) return invalid("tracker/n is NULL");
    size_t count = 0;
    for (const auto& [label, track] : tracker->state.track_log) {
        count += track.states.count(tracker->state.scan);
    }
    *n = count;
    return GLMB_OK;
}

glmb_status glmb_tracker_estimates(const glmb_tracker* tracker, glmb_estimate* out,
                                   size_t capacity, size_t* n) {
    if (tracker == nullptr || n == nullptr || (capacity > 0 && out == nullptr)) {
        return invalid("bad estimate buffer");
    }
    size_t count = 0;
    for (const auto& [label, track] : tracker->state.track_log) {
        const auto it = track.states.find(tracker->state.scan);
        if (it == track.states.end()) continue;
        if (count < capacity) {
            out[count] = glmb_estimate{label.birth_time, label.birth_index, it->second(0),
                                       it->second(1), it->second(2), it->second(3)};
        }
        ++count;
    }
    *n = count;
    return count <= capacity ? GLMB_OK : invalid("buffer too small for estimates");
}

glmb_status glmb_tracker_write_tracks(const glmb_tracker* tracker, const char* path) {
    if (tracker == nullptr || path == nullptr) return invalid("tracker/path is NULL");
    return guarded(
        [&] { glmb::write_tracks(path, glmb::reported_tracks(tracker->state)); });
}

}  // extern "C"
