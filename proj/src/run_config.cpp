#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace glmb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
    throw GlmbError(ErrorCode::ConfigInvalid, message);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (allowed.count(key) == 0) {
            fail("unknown key '" + (path.empty() ? key : path + "." + key) + "'");
        }
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail("'" + path + "." + key + "' must be a number");
    return obj[key].get<double>();
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail("'" + path + "." + key + "' must be an integer");
    return obj[key].get<std::int64_t>();
}

void check(bool ok, const std::string& message) {
    if (!ok) fail(message);
}

void parse_scenario(const json& s, ScenarioConfig& out) {
    require_keys(s, "scenario",
                 {"duration", "region", "birth_windows", "mixture_components", "mixture_scale",
                  "wishart_dof", "speed_range", "lifetime_range", "meas_noise_sigma",
                  "detection_prob", "clutter_rate"});
    out.duration = static_cast<int>(get_int(s, "scenario", "duration", out.duration));
    check(out.duration >= 0, "'scenario.duration' must be non-negative");
    if (s.contains("region")) {
        const json& r = s["region"];
        require_keys(r, "scenario.region", {"min", "max"});
        check(r.contains("min") && r.contains("max") && r["min"].is_array() &&
                  r["max"].is_array() && r["min"].size() == 2 && r["max"].size() == 2,
              "'scenario.region' needs 2-element 'min' and 'max'");
        out.region.lo = Eigen::Vector2d(r["min"][0].get<double>(), r["min"][1].get<double>());
        out.region.hi = Eigen::Vector2d(r["max"][0].get<double>(), r["max"][1].get<double>());
        check(out.region.area() > 0.0, "'scenario.region' must have positive area");
    }
    if (s.contains("birth_windows")) {
        check(s["birth_windows"].is_array(), "'scenario.birth_windows' must be an array");
        out.birth_windows.clear();
        for (const auto& w : s["birth_windows"]) {
            check(w.is_array() && w.size() == 3,
                  "'scenario.birth_windows' entries are [start, end, rate]");
            BirthWindow bw{w[0].get<int>(), w[1].get<int>(), w[2].get<double>()};
            check(bw.start <= bw.end && bw.rate >= 0.0,
                  "'scenario.birth_windows' entries must be ordered with rate >= 0");
            out.birth_windows.push_back(bw);
        }
    }
    out.mixture_components =
        static_cast<int>(get_int(s, "scenario", "mixture_components", out.mixture_components));
    check(out.mixture_components > 0, "'scenario.mixture_components' must be positive");
    const double scale = get_number(s, "scenario", "mixture_scale", out.mixture_scale(0, 0));
    check(scale > 0.0, "'scenario.mixture_scale' must be positive");
    out.mixture_scale = scale * Eigen::Matrix2d::Identity();
    out.wishart_dof = static_cast<int>(get_int(s, "scenario", "wishart_dof", out.wishart_dof));
    check(out.wishart_dof >= 3, "'scenario.wishart_dof' must be at least 3 for 2-D scale");
    if (s.contains("speed_range")) {
        const json& r = s["speed_range"];
        check(r.is_array() && r.size() == 2, "'scenario.speed_range' is [min, max]");
        out.speed_range = {r[0].get<double>(), r[1].get<double>()};
        check(out.speed_range.first <= out.speed_range.second && out.speed_range.first >= 0.0,
              "'scenario.speed_range' must be ordered and non-negative");
    }
    if (s.contains("lifetime_range")) {
        const json& r = s["lifetime_range"];
        check(r.is_array() && r.size() == 2, "'scenario.lifetime_range' is [min, max]");
        out.lifetime_range = {r[0].get<int>(), r[1].get<int>()};
        check(out.lifetime_range.first <= out.lifetime_range.second &&
                  out.lifetime_range.first > 0,
              "'scenario.lifetime_range' must be ordered and positive");
    }
    out.meas_noise_sigma = get_number(s, "scenario", "meas_noise_sigma", out.meas_noise_sigma);
    check(out.meas_noise_sigma > 0.0, "'scenario.meas_noise_sigma' must be positive");
    out.detection_prob = get_number(s, "scenario", "detection_prob", out.detection_prob);
    check(out.detection_prob >= 0.0 && out.detection_prob <= 1.0,
          "'scenario.detection_prob' must be in [0, 1]");
    out.clutter_rate = get_number(s, "scenario", "clutter_rate", out.clutter_rate);
    check(out.clutter_rate >= 0.0, "'scenario.clutter_rate' must be non-negative");
}

}  // namespace

TrackerConfig RunConfig::tracker_config() const {
    TrackerConfig cfg;
    cfg.motion = constant_velocity_model(motion_dt, motion_sigma_accel, survival_prob);
    cfg.sensor =
        position_sensor(sensor_sigma, sensor_detection_prob, sensor_clutter_rate, scenario.region);
    cfg.birth.mode = BirthMode::kMeasurementDriven;
    cfg.birth.adaptive_birth_prob = birth_prob;
    cfg.birth.adaptive_velocity_cov =
        birth_velocity_sigma * birth_velocity_sigma * Eigen::Matrix2d::Identity();
    cfg.birth.adaptive_position_inflation = birth_position_inflation;
    cfg.update = update;
    cfg.partition = partition;
    cfg.truncation_min_weight = truncation_min_weight;
    cfg.prune_existence = prune_existence;
    cfg.report_existence = report_existence;
    cfg.report_miss_scans = report_miss_scans;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
            if (json_text[i] == '\n') ++line;
        }
        fail("JSON syntax error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!root.is_object()) fail("config root must be a JSON object");

    require_keys(root, "",
                 {"seed", "threads", "output_dir", "scenario", "motion", "sensor", "birth",
                  "update", "partition", "tracker", "metric"});

    RunConfig cfg = default_run_config();
    if (root.contains("seed")) {
        check(root["seed"].is_number_unsigned() || root["seed"].is_number_integer(),
              "'seed' must be an integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    cfg.threads = static_cast<int>(get_int(root, "", "threads", cfg.threads));
    check(cfg.threads >= 0, "'threads' must be >= 0 (0 = auto)");
    if (root.contains("output_dir")) {
        check(root["output_dir"].is_string(), "'output_dir' must be a string");
        cfg.output_dir = root["output_dir"].get<std::string>();
    }

    if (root.contains("scenario")) parse_scenario(root["scenario"], cfg.scenario);

    if (root.contains("motion")) {
        const json& m = root["motion"];
        require_keys(m, "motion", {"dt", "sigma_accel", "survival_prob"});
        cfg.motion_dt = get_number(m, "motion", "dt", cfg.motion_dt);
        check(cfg.motion_dt > 0.0, "'motion.dt' must be positive");
        cfg.motion_sigma_accel = get_number(m, "motion", "sigma_accel", cfg.motion_sigma_accel);
        check(cfg.motion_sigma_accel >= 0.0, "'motion.sigma_accel' must be non-negative");
        cfg.survival_prob = get_number(m, "motion", "survival_prob", cfg.survival_prob);
        check(cfg.survival_prob > 0.0 && cfg.survival_prob <= 1.0,
              "'motion.survival_prob' must be in (0, 1]");
    }
    if (root.contains("sensor")) {
        const json& s = root["sensor"];
        require_keys(s, "sensor", {"meas_noise_sigma", "detection_prob", "clutter_rate"});
        cfg.sensor_sigma = get_number(s, "sensor", "meas_noise_sigma", cfg.sensor_sigma);
        check(cfg.sensor_sigma > 0.0, "'sensor.meas_noise_sigma' must be positive");
        cfg.sensor_detection_prob =
            get_number(s, "sensor", "detection_prob", cfg.sensor_detection_prob);
        check(cfg.sensor_detection_prob >= 0.0 && cfg.sensor_detection_prob <= 1.0,
              "'sensor.detection_prob' must be in [0, 1]");
        cfg.sensor_clutter_rate = get_number(s, "sensor", "clutter_rate", cfg.sensor_clutter_rate);
        check(cfg.sensor_clutter_rate >= 0.0, "'sensor.clutter_rate' must be non-negative");
    }
    if (root.contains("birth")) {
        const json& b = root["birth"];
        require_keys(b, "birth", {"probability", "velocity_sigma", "position_inflation"});
        cfg.birth_prob = get_number(b, "birth", "probability", cfg.birth_prob);
        check(cfg.birth_prob > 0.0 && cfg.birth_prob < 1.0,
              "'birth.probability' must be in (0, 1)");
        cfg.birth_velocity_sigma =
            get_number(b, "birth", "velocity_sigma", cfg.birth_velocity_sigma);
        check(cfg.birth_velocity_sigma > 0.0, "'birth.velocity_sigma' must be positive");
        cfg.birth_position_inflation =
            get_number(b, "birth", "position_inflation", cfg.birth_position_inflation);
        check(cfg.birth_position_inflation >= 1.0, "'birth.position_inflation' must be >= 1");
    }
    if (root.contains("update")) {
        const json& u = root["update"];
        require_keys(u, "update", {"requested_components", "gibbs_iterations", "exact_threshold"});
        cfg.update.requested_components = static_cast<std::size_t>(get_int(
            u, "update", "requested_components",
            static_cast<std::int64_t>(cfg.update.requested_components)));
        cfg.update.gibbs_iterations = static_cast<std::size_t>(
            get_int(u, "update", "gibbs_iterations",
                    static_cast<std::int64_t>(cfg.update.gibbs_iterations)));
        cfg.update.exact_threshold = static_cast<std::size_t>(get_int(
            u, "update", "exact_threshold", static_cast<std::int64_t>(cfg.update.exact_threshold)));
        check(cfg.update.requested_components > 0 && cfg.update.gibbs_iterations > 0,
              "'update' sizes must be positive");
    }
    if (root.contains("partition")) {
        const json& p = root["partition"];
        require_keys(p, "partition",
                     {"max_group_size", "initial_gate_prob", "backoff_factor",
                      "max_backoff_steps"});
        cfg.partition.max_group_size = static_cast<std::size_t>(get_int(
            p, "partition", "max_group_size",
            static_cast<std::int64_t>(cfg.partition.max_group_size)));
        check(cfg.partition.max_group_size > 0, "'partition.max_group_size' must be positive");
        cfg.partition.initial_gate_prob =
            get_number(p, "partition", "initial_gate_prob", cfg.partition.initial_gate_prob);
        check(cfg.partition.initial_gate_prob > 0.0 && cfg.partition.initial_gate_prob < 1.0,
              "'partition.initial_gate_prob' must be in (0, 1)");
        cfg.partition.backoff_factor =
            get_number(p, "partition", "backoff_factor", cfg.partition.backoff_factor);
        check(cfg.partition.backoff_factor > 0.0 && cfg.partition.backoff_factor < 1.0,
              "'partition.backoff_factor' must be in (0, 1)");
        cfg.partition.max_backoff_steps = static_cast<std::size_t>(get_int(
            p, "partition", "max_backoff_steps",
            static_cast<std::int64_t>(cfg.partition.max_backoff_steps)));
    }
    if (root.contains("tracker")) {
        const json& t = root["tracker"];
        require_keys(t, "tracker",
                     {"truncation_min_weight", "prune_existence", "report_existence",
                      "report_miss_scans"});
        cfg.truncation_min_weight =
            get_number(t, "tracker", "truncation_min_weight", cfg.truncation_min_weight);
        cfg.prune_existence = get_number(t, "tracker", "prune_existence", cfg.prune_existence);
        cfg.report_existence = get_number(t, "tracker", "report_existence", cfg.report_existence);
        cfg.report_miss_scans = static_cast<int>(
            get_int(t, "tracker", "report_miss_scans", cfg.report_miss_scans));
        check(cfg.truncation_min_weight >= 0.0 && cfg.truncation_min_weight < 1.0,
              "'tracker.truncation_min_weight' must be in [0, 1)");
        check(cfg.report_miss_scans > 0, "'tracker.report_miss_scans' must be positive");
    }
    if (root.contains("metric")) {
        const json& m = root["metric"];
        require_keys(m, "metric", {"cutoff", "order", "window"});
        cfg.metric.cutoff = get_number(m, "metric", "cutoff", cfg.metric.cutoff);
        check(cfg.metric.cutoff > 0.0, "'metric.cutoff' must be positive");
        cfg.metric.order = get_number(m, "metric", "order", cfg.metric.order);
        check(cfg.metric.order >= 1.0, "'metric.order' must be >= 1");
        cfg.window.length = static_cast<int>(get_int(m, "metric", "window", cfg.window.length));
        check(cfg.window.length >= 1, "'metric.window' must be >= 1");
    }

    // The scenario's sensor triple doubles as the tracker's assumed model
    // unless a sensor section overrides it.
    if (!root.contains("sensor")) {
        cfg.sensor_sigma = cfg.scenario.meas_noise_sigma;
        cfg.sensor_detection_prob = cfg.scenario.detection_prob;
        cfg.sensor_clutter_rate = cfg.scenario.clutter_rate;
    }
    cfg.scenario.rng_seed = cfg.seed;
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw GlmbError(ErrorCode::IoFailure, "cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_run_config(buffer.str());
    } catch (const GlmbError& e) {
        if (e.code() == ErrorCode::ConfigInvalid) {
            throw GlmbError(ErrorCode::ConfigInvalid, path + ": " + e.what());
        }
        throw;
    }
}

}  // namespace glmb
