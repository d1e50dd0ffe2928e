/*
 * gesturematch.h
 *
 * C interface to the gesture matching library: build or load a gesture
 * database, select strokes for speech-aligned slots (matched or baseline
 * modes), assemble selections into a BVH animation, and run the objective
 * evaluation harness.
 *
 * All functions return GM_OK (0) on success. On failure they return a
 * nonzero status and leave a human-readable detail in gm_last_error(),
 * which is thread-local. Strings returned through char** out-parameters
 * are owned by the caller and must be released with gm_string_free().
 */

#ifndef GESTUREMATCH_H
#define GESTUREMATCH_H

#include <stdint.h>

#if defined(_WIN32)
#define GM_API __declspec(dllexport)
#else
#define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gm_database gm_database; /* opaque */

typedef enum gm_status {
    GM_OK = 0,
    GM_ERR_IO = 1,
    GM_ERR_PARSE = 2,
    GM_ERR_INVALID_ARGUMENT = 3,
    GM_ERR_NOT_FOUND = 4,
    GM_ERR_MISMATCH = 5,
    GM_ERR_VERSION = 6,
    GM_ERR_CHECKSUM = 7,
    GM_ERR_DEGENERATE = 8,
    GM_ERR_EMPTY = 9,
    GM_ERR_INTERNAL = 10
} gm_status;

GM_API const char* gm_version(void);
GM_API const char* gm_status_name(gm_status status);

/* Detail message for the most recent failure on this thread. */
GM_API const char* gm_last_error(void);

/*
 * Database lifecycle.
 *
 * gm_database_build scans corpus_dir for *.bvh clips, reads the stroke
 * labels and joint map files, and computes the expressive parameters for
 * every labelled stroke. config_json may be NULL; it accepts the same keys
 * as the CLI config file (smoothing_window, tau, weights, ...). When
 * report_json is non-NULL it receives a build summary (entries built,
 * labels skipped with reasons, warnings).
 */
GM_API gm_status gm_database_build(const char* corpus_dir, const char* labels_path,
                                   const char* joint_map_path, const char* config_json,
                                   char** report_json, gm_database** out_db);

GM_API gm_status gm_database_load(const char* path, gm_database** out_db);
GM_API gm_status gm_database_save(const gm_database* db, const char* path);
GM_API void gm_database_free(gm_database* db);

GM_API int64_t gm_database_size(const gm_database* db);
GM_API gm_status gm_database_summary(const gm_database* db, char** out_json);
GM_API gm_status gm_database_entry(const gm_database* db, int64_t id, char** out_json);

/*
 * Selection. slots_json is the slot/target document; mode is one of
 * "matched", "unmatched", "unmatched_untimed", "ground_truth". The result
 * is a selections document (slot times -- scrambled for unmatched_untimed --
 * plus one record per slot with entry id, ranks, and total rank).
 */
GM_API gm_status gm_select(const gm_database* db, const char* slots_json, const char* mode,
                           uint64_t seed, const char* config_json, char** out_selections_json);

/*
 * Assembly. Renders the selections into one continuous clip with
 * synthesized preparations, retractions, and transitions, and returns the
 * BVH text. rest_json may be NULL (zero rest pose). Stroke onsets are
 * verified against the slots before rendering; mismatches fail hard.
 */
GM_API gm_status gm_assemble(const gm_database* db, const char* selections_json,
                             const char* rest_json, const char* config_json, char** out_bvh);

/*
 * Evaluation. conditions is a comma-separated subset of
 * "ground_truth,matched,unmatched,unmatched_untimed". Emits a per-slot CSV
 * and a JSON summary of the objective proxy metrics.
 */
GM_API gm_status gm_evaluate(const gm_database* db, const char* slots_json,
                             const char* conditions, uint64_t seed, const char* config_json,
                             char** out_csv, char** out_summary_json);

GM_API void gm_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* GESTUREMATCH_H */
