/* gridbench C API: a desk-scale embodied-instruction-following test bench.
 *
 * All functions return gb_status; on failure gb_last_error() carries a
 * message (thread-local). Strings returned through out-parameters are
 * heap-allocated and must be released with gb_string_free(). Handles are
 * opaque and must be released with their matching *_free function.
 */
#ifndef GRIDBENCH_CAPI_H
#define GRIDBENCH_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb_status {
  GB_OK = 0,
  GB_ERR_INVALID_ARGUMENT = 1,
  GB_ERR_IO = 2,
  GB_ERR_PARSE = 3,
  GB_ERR_INFEASIBLE = 4,
  GB_ERR_USAGE = 5,
  GB_ERR_COVERAGE = 6,
  GB_ERR_INTERNAL = 7
} gb_status;

const char* gb_version(void);
const char* gb_status_name(gb_status status);
const char* gb_last_error(void);
void gb_string_free(char* s);

typedef struct gb_world gb_world;
typedef struct gb_matrix gb_matrix;

/* Scenario config JSON text (NULL/empty: built-in default). A "registry"
 * key naming a category-registry file swaps the vocabulary. */
gb_status gb_world_generate(const char* config_json, uint64_t seed,
                            gb_world** out);
gb_status gb_world_load(const char* path, gb_world** out);
gb_status gb_world_save(const gb_world* world, const char* path);
gb_status gb_world_json(const gb_world* world, char** out_json);
/* Ground-truth top-down render (P6 PPM, deterministic palette). */
gb_status gb_world_render(const gb_world* world, const char* ppm_path);
void gb_world_free(gb_world* world);

gb_status gb_matrix_load(const char* path, gb_matrix** out);
gb_status gb_matrix_get(const gb_matrix* m, const char* target,
                        const char* landmark, double* out_value);
void gb_matrix_free(gb_matrix* m);

/* Runs an episode suite from a run-config JSON text and returns the report
 * JSON. Output files are written when the config sets "out_dir". When a
 * configured acceptance check fails, *checks_failed is set nonzero (the run
 * itself still succeeds). */
gb_status gb_suite_run(const char* config_json, char** out_report_json,
                       int* checks_failed);

/* Offline language-model workflow: dump every target x landmark x run
 * prompt, send them to any completion service, ingest the scores back. */
gb_status gb_prompts_dump(const char* prompt_spec_json, const char* out_path,
                          size_t* out_count);
gb_status gb_scores_ingest(const char* scores_path, const char* registry_path,
                           const char* out_matrix_path);

/* Renders a written report.json back into the text table. */
gb_status gb_report_text(const char* report_json_path, char** out_text);

#ifdef __cplusplus
}
#endif
#endif /* GRIDBENCH_CAPI_H */
