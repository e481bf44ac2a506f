/* C interface for the causalbench simulation engine.
 *
 * All entry points return a cb_status; CB_OK is zero.  On failure the
 * thread-local message retrieved by cb_last_error() describes what went
 * wrong.  Objects returned through out-parameters are owned by the caller
 * and released with the matching _destroy function.  Handles are opaque;
 * a NULL handle argument yields CB_ERROR_INVALID_ARGUMENT, never a crash.
 *
 * A cb_config starts from built-in defaults (50-block effect grid, 200
 * replicates per block, 500 patients) or from a JSON document, and is
 * adjusted with the setters below.  cb_run_grid executes the full grid in
 * memory; cb_result_write_outputs serializes records.csv plus the
 * aggregate tables and plot-data files into a directory.
 */
#ifndef CAUSALBENCH_H
#define CAUSALBENCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
    CB_OK = 0,
    CB_ERROR_INVALID_ARGUMENT = 1, /* bad handle, bad value, failed validation */
    CB_ERROR_PARSE = 2,            /* malformed or unknown-key JSON config */
    CB_ERROR_NUMERIC = 3,          /* simulation or estimation failure */
    CB_ERROR_IO = 4,               /* file system failure */
    CB_ERROR_INTERNAL = 5          /* unexpected condition */
} cb_status;

typedef struct cb_config cb_config;
typedef struct cb_result cb_result;

/* Library version, "major.minor.patch". Static storage; do not free. */
const char* cb_version(void);

/* Static description of a status code ("ok", "parse error", ...). */
const char* cb_status_message(cb_status status);

/* Message from the most recent failing call on THIS thread; empty string
 * if none. Owned by the library. */
const char* cb_last_error(void);

/* ---- configuration ---------------------------------------------------- */

cb_status cb_config_create_default(cb_config** out_config);
cb_status cb_config_parse_json(const char* json_text, cb_config** out_config);
cb_status cb_config_load_json(const char* path, cb_config** out_config);
void cb_config_destroy(cb_config* config);

cb_status cb_config_set_base_seed(cb_config* config, uint64_t seed);
cb_status cb_config_set_reps_per_block(cb_config* config, int reps);
/* workers = 0 selects automatic (hardware concurrency). */
cb_status cb_config_set_workers(cb_config* config, int workers);
cb_status cb_config_set_output_dir(cb_config* config, const char* dir);

/* Restrict the run to the given 1-based grid positions without renumbering
 * them (selected blocks keep the seeds they would have in a full run).
 * count = 0 restores the full grid. */
cb_status cb_config_select_blocks(cb_config* config, const int* blocks, size_t count);

/* Serialize the full effective configuration as pretty-printed JSON.
 * *out_text is malloc'd; release with cb_string_free. */
cb_status cb_config_to_json(const cb_config* config, char** out_text);
void cb_string_free(char* text);

/* ---- execution --------------------------------------------------------- */

/* Run every selected block x replicate. Purely computational: nothing is
 * written until cb_result_write_outputs. */
cb_status cb_run_grid(const cb_config* config, cb_result** out_result);

/* Write records.csv, table1.csv, table2.csv, fig1..fig3.csv, pooled.csv.
 * out_dir = NULL uses the configured output_dir. */
cb_status cb_result_write_outputs(const cb_result* result, const char* out_dir);

cb_status cb_result_record_count(const cb_result* result, size_t* out_count);
cb_status cb_result_block_count(const cb_result* result, size_t* out_count);
void cb_result_destroy(cb_result* result);

/* Recompute every aggregate file from an existing records.csv. */
cb_status cb_summarize_records(const char* records_csv_path, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CAUSALBENCH_H */
