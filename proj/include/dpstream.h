#ifndef DPSTREAM_H_
#define DPSTREAM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DPSTREAM_BUILDING)
#define DPSTREAM_API __attribute__((visibility("default")))
#else
#define DPSTREAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DPSTREAM_OK = 0,
  DPSTREAM_E_INVALID_ARGUMENT = 1,
  DPSTREAM_E_SCHEMA_MISMATCH = 2,
  DPSTREAM_E_OUT_OF_RANGE = 3,
  DPSTREAM_E_BUDGET_EXCEEDED = 4,
  DPSTREAM_E_NUMERICAL = 5,
  DPSTREAM_E_IO = 6,
  DPSTREAM_E_PARSE = 7,
  DPSTREAM_E_FAILED_PRECONDITION = 8,
  DPSTREAM_E_INTERNAL = 99
} dpstream_status;

// Message of the last failed call on this thread ("" if none).
DPSTREAM_API const char* dpstream_last_error(void);
DPSTREAM_API const char* dpstream_version(void);

// Strings returned through char** out-parameters are owned by the caller.
DPSTREAM_API void dpstream_string_free(char* s);

typedef struct dpstream_schema dpstream_schema;
typedef struct dpstream_workloads dpstream_workloads;
typedef struct dpstream_counter dpstream_counter;
typedef struct dpstream_synth dpstream_synth;
typedef struct dpstream_report dpstream_report;

/* Schema */

DPSTREAM_API dpstream_status dpstream_schema_create(
    size_t num_attributes, const char* const* names,
    const uint32_t* cardinalities, dpstream_schema** out);
// JSON list of {"name", "values"} objects.
DPSTREAM_API dpstream_status dpstream_schema_load(const char* path,
                                                  dpstream_schema** out);
DPSTREAM_API size_t dpstream_schema_num_attributes(const dpstream_schema* s);
DPSTREAM_API uint32_t dpstream_schema_cardinality(const dpstream_schema* s,
                                                  size_t attribute);
DPSTREAM_API void dpstream_schema_free(dpstream_schema* s);

/* Workloads */

DPSTREAM_API dpstream_status dpstream_workloads_enumerate(
    const dpstream_schema* schema, size_t k, dpstream_workloads** out);
DPSTREAM_API size_t dpstream_workloads_count(const dpstream_workloads* w);
// Number of cells of workload i (0 if i is out of range).
DPSTREAM_API size_t dpstream_workloads_cells(const dpstream_workloads* w,
                                             size_t i);
// Copies up to `capacity` column indices of workload i; returns its arity.
DPSTREAM_API size_t dpstream_workloads_columns(const dpstream_workloads* w,
                                               size_t i, size_t* columns,
                                               size_t capacity);
DPSTREAM_API void dpstream_workloads_free(dpstream_workloads* w);

// Workload list of a schema file as JSON (what `enumerate-workloads` prints).
DPSTREAM_API dpstream_status dpstream_enumerate_workloads_json(
    const char* schema_path, size_t k, char** out_json);

/* Counters */

// kind: "simple", "block", "binary_tree", "unbounded_block".
// noise: "laplace" or "zero". block_size 0 uses ceil(sqrt(horizon)).
DPSTREAM_API dpstream_status dpstream_counter_create(
    const char* kind, double epsilon, const char* noise, uint64_t seed,
    uint64_t block_size, uint64_t horizon, dpstream_counter** out);
DPSTREAM_API dpstream_status dpstream_counter_feed(dpstream_counter* c,
                                                   double value, double* out);
DPSTREAM_API double dpstream_counter_peek(const dpstream_counter* c);
DPSTREAM_API uint64_t dpstream_counter_steps(const dpstream_counter* c);
DPSTREAM_API void dpstream_counter_free(dpstream_counter* c);

/* Synthesizers */

typedef struct {
  const char* algorithm;  // "baseline" or "main"
  double epsilon;
  size_t k;
  const char* counter;
  uint64_t block_size;
  uint64_t horizon;
  double sensitivity;  // <= 0: default
  int mw_passes;
  size_t support_size;
  uint64_t support_seed;
  int clamp_measurements;
  uint64_t seed;
  const char* noise;
} dpstream_synth_config;

DPSTREAM_API void dpstream_synth_config_init(dpstream_synth_config* config);

DPSTREAM_API dpstream_status dpstream_synth_create(
    const dpstream_synth_config* config, const dpstream_schema* schema,
    const dpstream_workloads* workloads, dpstream_synth** out);
// One differential: `count` points of `num_attributes` values each, row-major,
// with the given non-negative weights (NULL means weight 1).
DPSTREAM_API dpstream_status dpstream_synth_step(dpstream_synth* s,
                                                 const uint32_t* points,
                                                 const double* weights,
                                                 size_t count);
DPSTREAM_API size_t dpstream_synth_time(const dpstream_synth* s);
DPSTREAM_API double dpstream_synth_mass(const dpstream_synth* s);
// W_i(g_t) into `out`, which must hold dpstream_workloads_cells(w, i) values.
DPSTREAM_API dpstream_status dpstream_synth_answers(const dpstream_synth* s,
                                                    size_t workload,
                                                    double* out,
                                                    size_t capacity);
// Fraction of epsilon spent so far, as a decimal.
DPSTREAM_API double dpstream_synth_budget_share(const dpstream_synth* s);
DPSTREAM_API void dpstream_synth_free(dpstream_synth* s);

/* Experiments */

// Runs the config's full grid. noise may be NULL to keep the config value.
// Returns DPSTREAM_OK even if individual triples failed; check the report.
DPSTREAM_API dpstream_status dpstream_run_config(const char* config_path,
                                                 unsigned jobs,
                                                 const char* noise,
                                                 dpstream_report** out);
DPSTREAM_API size_t dpstream_report_runs(const dpstream_report* r);
DPSTREAM_API size_t dpstream_report_failed(const dpstream_report* r);
// Borrowed; valid until the report is freed.
DPSTREAM_API const char* dpstream_report_json(const dpstream_report* r);
DPSTREAM_API void dpstream_report_free(dpstream_report* r);

// Loads the config, schema and data and builds the stream without running.
DPSTREAM_API dpstream_status dpstream_validate_config(const char* config_path,
                                                      char** out_json);

#ifdef __cplusplus
}
#endif

#endif  // DPSTREAM_H_
