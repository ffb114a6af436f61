#ifndef EOAGENT_EOAGENT_H
#define EOAGENT_EOAGENT_H

/*
 * C interface to the eoagent library.
 *
 * Objects are opaque handles created by *_create / *_load / *_start functions
 * and released by the matching *_free. Functions return EOA_OK or an error
 * status; the message for the last failure on the calling thread is available
 * from eoa_last_error(). Strings returned through char** out-parameters are
 * heap-allocated and must be released with eoa_string_free().
 *
 * Structured inputs and outputs are JSON documents using the same schemas as
 * the files and HTTP messages (see docs/schemas.md).
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(EOA_BUILDING_LIBRARY)
#define EOA_API __attribute__((visibility("default")))
#else
#define EOA_API
#endif

typedef enum eoa_status {
  EOA_OK = 0,
  EOA_ERR_INVALID_ARGUMENT,
  EOA_ERR_MISSING_METADATA,
  EOA_ERR_BAND_SIZE_MISMATCH,
  EOA_ERR_TRUNCATED_BAND_FILE,
  EOA_ERR_UNKNOWN_BAND_ID,
  EOA_ERR_INVALID_VALUE,
  EOA_ERR_IO_FAILURE,
  EOA_ERR_INVALID_SPEC,
  EOA_ERR_MISSING_BAND,
  EOA_ERR_INVALID_CONFIG,
  EOA_ERR_INVALID_STRIDE,
  EOA_ERR_DIMENSION_MISMATCH,
  EOA_ERR_BACKEND_FAILURE,
  EOA_ERR_TIMEOUT,
  EOA_ERR_CONNECTION_FAILURE,
  EOA_ERR_REMOTE_ERROR,
  EOA_ERR_SCHEMA_VIOLATION,
  EOA_ERR_UNKNOWN_SCENE,
  EOA_ERR_BIND_FAILURE,
  EOA_ERR_SCENE_SET_MISMATCH,
  EOA_ERR_ZERO_ROUTED_TIME,
  EOA_ERR_INSUFFICIENT_SAMPLES,
  EOA_ERR_STAGE_FAILURE,
  EOA_ERR_INTERNAL
} eoa_status;

typedef struct eoa_scene eoa_scene;
typedef struct eoa_workflow eoa_workflow;
typedef struct eoa_node_server eoa_node_server;

EOA_API const char* eoa_version(void);
/* Kebab-case name of a status, e.g. "truncated-band-file". */
EOA_API const char* eoa_status_name(eoa_status status);
/* Message of the last failed call on this thread; "" after a success. */
EOA_API const char* eoa_last_error(void);
EOA_API void eoa_string_free(char* s);

/* ---- scenes ------------------------------------------------------------ */

EOA_API eoa_status eoa_scene_load(const char* dir, eoa_scene** out);
/* spec_json: a synthetic scene spec. */
EOA_API eoa_status eoa_scene_synthesize(const char* spec_json, eoa_scene** out);
EOA_API eoa_status eoa_scene_save(const eoa_scene* scene, const char* dir);
/* {"scene_id", "width", "height", "pixel_size_m", "area_km2", "label", "bands"} */
EOA_API eoa_status eoa_scene_info(const eoa_scene* scene, char** out_json);
EOA_API void eoa_scene_free(eoa_scene* scene);

/* ---- agents ------------------------------------------------------------ */

/* settings_json may be NULL for defaults. tool: ml_fire | index_fire |
 * burned_area | ml_flood. Writes a ToolResult. */
EOA_API eoa_status eoa_run_tool(const eoa_scene* scene, const char* tool, const char* settings_json,
                                char** out_json);
/* role: early_warning | wildfire_specialist | flood_specialist. Writes a
 * HypothesisReport or SpecialistReport. */
EOA_API eoa_status eoa_agent_analyze(const eoa_scene* scene, const char* role, const char* settings_json,
                                     char** out_json);
/* request_json: {"hypothesis", "hypothesis_absent", "specialist_reports"}.
 * Writes a FinalAlert. */
EOA_API eoa_status eoa_decision_fuse(const char* request_json, const char* settings_json, char** out_json);

/* ---- workflows --------------------------------------------------------- */

/* config_json may be NULL for in-process defaults. dataset_root may be NULL
 * to use the config's root or, failing that, the manifest directory. */
EOA_API eoa_status eoa_workflow_create(const char* config_json, const char* manifest_path,
                                       const char* dataset_root, eoa_workflow** out);
/* modes: comma-separated "baseline,routed", or NULL for the configured list.
 * Appends one JSON line per record to jsonl_path (truncated first) and
 * reports how many records failed. */
EOA_API eoa_status eoa_workflow_run_dataset(eoa_workflow* workflow, const char* modes, const char* jsonl_path,
                                            int* out_records, int* out_failures);
EOA_API void eoa_workflow_free(eoa_workflow* workflow);

/* ---- node servers ------------------------------------------------------ */

/* node_json: a node descriptor ({"node_id", "role", ...}; endpoint optional).
 * port 0 picks an ephemeral port. */
EOA_API eoa_status eoa_node_server_start(const char* node_json, const char* host, int port,
                                         const char* settings_json, const char* dataset_root,
                                         const char* manifest_path, eoa_node_server** out);
EOA_API int eoa_node_server_port(const eoa_node_server* server);
/* Blocks until eoa_node_server_stop() is called from another thread. */
EOA_API eoa_status eoa_node_server_wait(eoa_node_server* server);
EOA_API eoa_status eoa_node_server_stop(eoa_node_server* server);
EOA_API void eoa_node_server_free(eoa_node_server* server);

/* ---- benchmark --------------------------------------------------------- */

/* method: "pearson" | "spearman" (NULL = pearson). out_dir may be NULL to
 * skip writing files. out_json receives the report, out_text the table;
 * either may be NULL. */
EOA_API eoa_status eoa_bench_report(const char* records_path, const char* method, const char* out_dir,
                                    char** out_json, char** out_text);

/* preset: "mixed" | "two-regime" | "exemplars". Writes scenes and
 * manifest.json into out_dir and returns the manifest as JSON. */
EOA_API eoa_status eoa_synth_dataset(const char* preset, int count, unsigned long long seed, const char* out_dir,
                                     char** out_json);

#ifdef __cplusplus
}
#endif

#endif
