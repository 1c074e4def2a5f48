/* PhishGuard C API.
 *
 * All functions return a pg_status. On failure, pg_last_error() returns a
 * message for the calling thread, valid until the next call on that thread.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with pg_string_free. Handles are released with their _free
 * function; passing NULL to any _free function is a no-op.
 */
#ifndef PHISHGUARD_H
#define PHISHGUARD_H

#include <stddef.h>

#if defined(PHISHGUARD_BUILDING_LIBRARY)
#define PG_API __attribute__((visibility("default")))
#else
#define PG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pg_status {
  PG_OK = 0,
  PG_ERR_CONFIG = 1,
  PG_ERR_RUNTIME = 2,
  PG_ERR_IO = 3,
  PG_ERR_INVALID_ARGUMENT = 4
} pg_status;

typedef struct pg_report pg_report;
typedef struct pg_model pg_model;
typedef struct pg_dataset pg_dataset;

PG_API const char* pg_version(void);
PG_API const char* pg_last_error(void);
PG_API void pg_string_free(char* s);

/* Parses the config (with an optional JSON merge-patch of overrides, may be
 * NULL) and loads its dataset. On success *summary receives a short text
 * description of the schema and run settings. */
PG_API pg_status pg_config_validate(const char* config_path, const char* overrides_json, char** summary);

/* Runs the full experiment and writes artifacts to the configured output
 * directory (if any). */
PG_API pg_status pg_experiment_run(const char* config_path, const char* overrides_json, pg_report** out);

PG_API pg_status pg_report_load(const char* path, pg_report** out);
/* format: "table" (human) or "raw" (JSON, full precision). */
PG_API pg_status pg_report_render(const pg_report* report, const char* format, char** out);
/* JSON without the volatile field (timestamp, timings). */
PG_API pg_status pg_report_deterministic_json(const pg_report* report, char** out);
PG_API pg_status pg_report_compare(const pg_report* const* reports, size_t count, char** out);
PG_API pg_status pg_report_save(const pg_report* report, const char* path);
PG_API pg_status pg_report_phishguard_accuracy(const pg_report* report, double* accuracy);
PG_API void pg_report_free(pg_report* report);

PG_API pg_status pg_model_load(const char* path, pg_model** out);
PG_API pg_status pg_model_input_dim(const pg_model* model, size_t* dim);
/* rows: n_rows x n_cols row-major raw features; scores receives n_rows values. */
PG_API pg_status pg_model_score(const pg_model* model, const double* rows, size_t n_rows, size_t n_cols,
                                double* scores);
/* Scores every row of a CSV using the model's stored schema. Writes
 * "row,score,label" lines to out_path, or returns them in *text when
 * out_path is NULL. */
PG_API pg_status pg_model_predict_csv(const pg_model* model, const char* csv_path, const char* out_path, char** text);
PG_API void pg_model_free(pg_model* model);

/* Loads the dataset referenced by a config. */
PG_API pg_status pg_dataset_load(const char* config_path, pg_dataset** out);
PG_API pg_status pg_dataset_shape(const pg_dataset* ds, size_t* rows, size_t* features, size_t* phishing);
PG_API void pg_dataset_free(pg_dataset* ds);

#ifdef __cplusplus
}
#endif

#endif /* PHISHGUARD_H */
