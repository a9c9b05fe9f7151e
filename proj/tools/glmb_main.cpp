// Command-line front end; talks to the tracking library through the public C
// API only. Exit codes: 0 ok, 2 usage/config error, 3 runtime failure.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "glmb/glmb.h"

namespace {

int exit_code(glmb_status status) {
    switch (status) {
        case GLMB_OK:
            return 0;
        case GLMB_ERR_INVALID_ARGUMENT:
        case GLMB_ERR_CONFIG:
            return 2;
        default:
            return 3;
    }
}

int fail(glmb_status status) {
    std::cerr << "error: " << glmb_last_error() << "\n";
    return exit_code(status);
}

/// --threads wins, then GLMB_THREADS, then the config file (0 = auto).
int resolve_threads(const CLI::Option* opt, int flag_value) {
    if (opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("GLMB_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (const std::exception&) {
            return 0;
        }
    }
    return -1;  // keep config value
}

struct ConfigHandle {
    glmb_config* cfg = nullptr;
    ~ConfigHandle() { glmb_config_free(cfg); }
};

int load_config(const std::string& path, const CLI::Option* seed_opt, std::uint64_t seed,
                const CLI::Option* threads_opt, int threads, ConfigHandle& handle) {
    glmb_status status = glmb_config_load(path.c_str(), &handle.cfg);
    if (status != GLMB_OK) return fail(status);
    if (seed_opt->count() > 0) glmb_config_set_seed(handle.cfg, seed);
    const int resolved = resolve_threads(threads_opt, threads);
    if (resolved >= 0) glmb_config_set_threads(handle.cfg, resolved);
    return 0;
}

std::string output_dir(const ConfigHandle& handle, const CLI::Option* out_opt,
                       const std::string& out_flag) {
    if (out_opt->count() > 0) return out_flag;
    char buffer[4096];
    if (glmb_config_output_dir(handle.cfg, buffer, sizeof(buffer)) == GLMB_OK) {
        return buffer;
    }
    return "out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalable GLMB multi-object tracker"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_flag;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        CLI::Option* config = cmd->add_option("--config", config_path, "run configuration JSON");
        if (needs_config) config->required();
        CLI::Option* seed_opt = cmd->add_option("--seed", seed, "override the run seed");
        CLI::Option* threads_opt =
            cmd->add_option("--threads", threads, "worker threads (0 = auto)");
        CLI::Option* out_opt = cmd->add_option("--out", out_flag, "output directory");
        return std::tuple{seed_opt, threads_opt, out_opt};
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate truth.tracks and scans.jsonl");
    auto [sim_seed, sim_threads, sim_out] = add_common(simulate, true);

    CLI::App* track = app.add_subcommand("track", "run the tracker over scans.jsonl");
    auto [trk_seed, trk_threads, trk_out] = add_common(track, true);

    CLI::App* evaluate = app.add_subcommand("evaluate", "windowed track metric for two track files");
    std::string truth_path, est_path;
    double cutoff = 2.0, order = 1.0;
    int window = 50;
    evaluate->add_option("truth", truth_path, "truth .tracks file")->required();
    evaluate->add_option("estimates", est_path, "estimated .tracks file")->required();
    evaluate->add_option("--cutoff", cutoff, "metric cutoff c (meters)");
    evaluate->add_option("--order", order, "metric order p");
    evaluate->add_option("--window", window, "sliding window length in scans");
    CLI::Option* eval_threads = evaluate->add_option("--threads", threads, "worker threads");
    CLI::Option* eval_out = evaluate->add_option("--out", out_flag, "output directory");

    CLI::App* report = app.add_subcommand("report", "summarize a finished run");
    std::string diag_path, ospa2_path, rep_truth, rep_est;
    report->add_option("diag", diag_path, "diag.csv from track")->required();
    report->add_option("ospa2", ospa2_path, "ospa2.csv from evaluate")->required();
    report->add_option("truth", rep_truth, "truth .tracks file")->required();
    report->add_option("estimates", rep_est, "estimated .tracks file")->required();
    CLI::Option* rep_out = report->add_option("--out", out_flag, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (simulate->parsed()) {
        ConfigHandle handle;
        if (int rc = load_config(config_path, sim_seed, seed, sim_threads, threads, handle)) {
            return rc;
        }
        const glmb_status status =
            glmb_simulate(handle.cfg, output_dir(handle, sim_out, out_flag).c_str());
        return status == GLMB_OK ? 0 : fail(status);
    }
    if (track->parsed()) {
        ConfigHandle handle;
        if (int rc = load_config(config_path, trk_seed, seed, trk_threads, threads, handle)) {
            return rc;
        }
        const glmb_status status =
            glmb_track(handle.cfg, output_dir(handle, trk_out, out_flag).c_str());
        return status == GLMB_OK ? 0 : fail(status);
    }
    if (evaluate->parsed()) {
        const int resolved = std::max(0, resolve_threads(eval_threads, threads));
        const std::string dir = eval_out->count() > 0 ? out_flag : "out";
        const glmb_status status = glmb_evaluate(truth_path.c_str(), est_path.c_str(), cutoff,
                                                 order, window, resolved, dir.c_str());
        return status == GLMB_OK ? 0 : fail(status);
    }
    const std::string dir = rep_out->count() > 0 ? out_flag : "out";
    const glmb_status status = glmb_report(diag_path.c_str(), ospa2_path.c_str(),
                                           rep_truth.c_str(), rep_est.c_str(), dir.c_str());
    return status == GLMB_OK ? 0 : fail(status);
}
