#pragma once

#include <string>

#include "run_config.hpp"

namespace glmb {

/// Generates the scenario and writes truth.tracks + scans.jsonl to out_dir.
void run_simulate(const RunConfig& cfg, const std::string& out_dir);

/// Reads scans.jsonl from out_dir, runs the tracker, writes est.tracks +
/// diag.csv.
void run_track(const RunConfig& cfg, const std::string& out_dir);

struct EvaluateOptions {
    double cutoff = 2.0;
    double order = 1.0;
    int window = 50;
    int threads = 0;
};

/// Writes the windowed track-metric series to ospa2.csv (plus ospa.csv when
/// window == 1, where the two coincide).
void run_evaluate(const std::string& truth_path, const std::string& est_path,
                  const EvaluateOptions& options, const std::string& out_dir);

/// Writes summary.txt, cardinality.csv and density.csv from a finished run.
void run_report(const std::string& diag_csv, const std::string& ospa2_csv,
                const std::string& truth_path, const std::string& est_path,
                const std::string& out_dir);

}  // namespace glmb
