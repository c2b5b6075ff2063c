#ifndef PLCNET_PLCNET_H
#define PLCNET_PLCNET_H

/*
 * C interface of the plcnet analyzer. Every call returns a status code; the
 * message of the last failure on the calling thread is available from
 * plcnet_last_error(). Strings returned through `char**` are owned by the
 * caller and released with plcnet_string_free().
 */

#include <stddef.h>

#if defined(PLCNET_BUILDING)
#define PLCNET_API __attribute__((visibility("default")))
#else
#define PLCNET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plcnet_status {
  PLCNET_OK = 0,
  PLCNET_E_ARGUMENT = 1, /* null pointer or malformed option */
  PLCNET_E_SOURCE = 2,   /* ST syntax or elaboration error */
  PLCNET_E_SCENARIO = 3, /* scenario file unreadable or invalid */
  PLCNET_E_ENGINE = 4,   /* error while exploring (e.g. missing connection) */
  PLCNET_E_INTERNAL = 5
} plcnet_status;

typedef enum plcnet_verdict {
  PLCNET_SOLUTION_FOUND = 0,
  PLCNET_NO_SOLUTION = 1,
  PLCNET_BOUND_EXHAUSTED = 2
} plcnet_verdict;

/* Tri-state switch: keep the scenario's setting, or force off / on. */
#define PLCNET_DEFAULT (-1)

typedef struct plcnet_model plcnet_model;

typedef struct plcnet_options {
  int symbolic;          /* PLCNET_DEFAULT, 0 concrete, 1 symbolic */
  int por;               /* PLCNET_DEFAULT, 0, 1 */
  int clock_sep;         /* PLCNET_DEFAULT, 0, 1 */
  const char* bound;     /* rational text ("20", "5/2"); NULL keeps the scenario bound */
  const char* solver;    /* external SMT command; NULL auto-detects, "" disables */
  const char* reach;     /* reach predicate replacing the scenario property, or NULL */
  const char* safety;    /* safety invariant replacing the scenario property, or NULL */
  size_t max_states;     /* 0: unlimited */
  size_t max_solutions;  /* 0 means 1 */
} plcnet_options;

/* Fills `opts` with defaults (everything from the scenario). */
PLCNET_API void plcnet_options_init(plcnet_options* opts);

PLCNET_API const char* plcnet_version(void);
PLCNET_API const char* plcnet_last_error(void);
PLCNET_API void plcnet_string_free(char* s);

/* Parses and elaborates ST files together with the builtin blocks.
 * `report` receives JSON: {"ok": bool, "files": [...], "pous": [...], "errors": [...]}. */
PLCNET_API plcnet_status plcnet_parse_files(const char* const* paths, size_t count, char** report);

PLCNET_API plcnet_status plcnet_model_load(const char* path, plcnet_model** out);
PLCNET_API plcnet_status plcnet_model_load_text(const char* json, const char* base_dir, plcnet_model** out);
PLCNET_API void plcnet_model_free(plcnet_model* m);

/* Text dump of the initial state. */
PLCNET_API plcnet_status plcnet_model_describe(const plcnet_model* m, char** out);

/* Bounded search for the scenario (or option) property. `result` receives
 * JSON with the verdict, solutions with traces, statistics and diagnostics. */
PLCNET_API plcnet_status plcnet_check(const plcnet_model* m, const plcnet_options* opts, plcnet_verdict* verdict,
                                      char** result);

/* Deterministic concrete run until the clock reaches `until` (NULL: no limit)
 * or `max_steps` steps (0: 10000). `result` receives JSON with the trace, its
 * text rendering and the final state. */
PLCNET_API plcnet_status plcnet_simulate(const plcnet_model* m, const plcnet_options* opts, const char* until,
                                         size_t max_steps, char** result);

/* Searches with reduction off and on (and, with `grid`, clock separation
 * off and on). `result` receives JSON rows and whether the verdicts agree. */
PLCNET_API plcnet_status plcnet_stats(const plcnet_model* m, const plcnet_options* opts, int grid, char** result);

#ifdef __cplusplus
}
#endif

#endif
