/* C interface to the GLMB large-scale multi-object tracking library.
 *
 * All functions return glmb_status; on failure glmb_last_error() carries a
 * human-readable message for the calling thread. Handles are opaque and
 * freed with their matching *_free function.
 */
#ifndef GLMB_GLMB_H
#define GLMB_GLMB_H

#include <stddef.h>
#include <stdint.h>

#if defined(GLMB_BUILD_SHARED)
#define GLMB_API __attribute__((visibility("default")))
#else
#define GLMB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum glmb_status {
    GLMB_OK = 0,
    GLMB_ERR_INVALID_ARGUMENT = 1,
    GLMB_ERR_CONFIG = 2,
    GLMB_ERR_RUNTIME = 3,
    GLMB_ERR_IO = 4
} glmb_status;

typedef struct glmb_config glmb_config;
typedef struct glmb_tracker glmb_tracker;

GLMB_API const char* glmb_version(void);

/* Message of the most recent failure on this thread; never NULL. */
GLMB_API const char* glmb_last_error(void);

/* ---- Configuration ---- */

GLMB_API glmb_status glmb_config_default(glmb_config** out);
GLMB_API glmb_status glmb_config_load(const char* path, glmb_config** out);
GLMB_API glmb_status glmb_config_parse(const char* json_text, glmb_config** out);
GLMB_API void glmb_config_free(glmb_config* cfg);

GLMB_API glmb_status glmb_config_set_seed(glmb_config* cfg, uint64_t seed);
GLMB_API glmb_status glmb_config_set_threads(glmb_config* cfg, int threads);
GLMB_API glmb_status glmb_config_output_dir(const glmb_config* cfg, char* buffer, size_t size);

/* ---- One-shot runs (the CLI subcommands) ---- */

/* Writes truth.tracks and scans.jsonl into out_dir. */
GLMB_API glmb_status glmb_simulate(const glmb_config* cfg, const char* out_dir);

/* Reads scans.jsonl from out_dir, writes est.tracks and diag.csv. */
GLMB_API glmb_status glmb_track(const glmb_config* cfg, const char* out_dir);

/* Writes ospa2.csv (and ospa.csv when window == 1) into out_dir. */
GLMB_API glmb_status glmb_evaluate(const char* truth_path, const char* est_path, double cutoff,
                                   double order, int window, int threads, const char* out_dir);

/* Writes summary.txt, cardinality.csv and density.csv into out_dir. */
GLMB_API glmb_status glmb_report(const char* diag_csv, const char* ospa2_csv,
                                 const char* truth_path, const char* est_path,
                                 const char* out_dir);

/* ---- Incremental tracking ---- */

typedef struct glmb_estimate {
    int32_t label_time;  /* birth scan of the label */
    int32_t label_index; /* index among labels born that scan */
    double x, y, vx, vy;
} glmb_estimate;

GLMB_API glmb_status glmb_tracker_create(const glmb_config* cfg, glmb_tracker** out);
GLMB_API void glmb_tracker_free(glmb_tracker* tracker);

/* Feeds one scan of n measurements as flattened (x, y) pairs. */
GLMB_API glmb_status glmb_tracker_step(glmb_tracker* tracker, const double* xy, size_t n);

/* Object estimates reported for the scan last fed to glmb_tracker_step. */
GLMB_API glmb_status glmb_tracker_estimate_count(const glmb_tracker* tracker, size_t* n);
GLMB_API glmb_status glmb_tracker_estimates(const glmb_tracker* tracker, glmb_estimate* out,
                                            size_t capacity, size_t* n);

/* Writes every track reported so far in the est.tracks format. */
GLMB_API glmb_status glmb_tracker_write_tracks(const glmb_tracker* tracker, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* GLMB_GLMB_H */
