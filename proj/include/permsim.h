#ifndef PERMSIM_H
#define PERMSIM_H

/* C interface to the permsim shared library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return a permsim_status; on failure permsim_last_error()
 * holds a thread-local description of what went wrong. Strings returned
 * through char** out-parameters are heap-allocated and must be released
 * with permsim_string_free().
 */

#include <stdint.h>

#if defined(_WIN32)
#define PERMSIM_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PERMSIM_API __attribute__((visibility("default")))
#else
#define PERMSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct permsim_graph permsim_graph;

typedef enum permsim_status {
  PERMSIM_OK = 0,
  PERMSIM_ERR_PARSE = 1,
  PERMSIM_ERR_INVALID_ARGUMENT = 2,
  PERMSIM_ERR_OVER_CAP = 3,
  PERMSIM_ERR_UNSUPPORTED = 4,
  PERMSIM_ERR_INTERNAL = 5
} permsim_status;

typedef enum permsim_format {
  PERMSIM_FORMAT_AUTO = 0,
  PERMSIM_FORMAT_GRAPH6 = 1,
  PERMSIM_FORMAT_DIMACS = 2,
  PERMSIM_FORMAT_EDGE_LIST = 3,
  PERMSIM_FORMAT_DENSE = 4
} permsim_format;

typedef enum permsim_validation {
  PERMSIM_INPUT_REGULAR = 0,
  PERMSIM_INPUT_NOT_REGULAR = 1,
  PERMSIM_INPUT_DISCONNECTED = 2
} permsim_validation;

typedef enum permsim_mode {
  PERMSIM_MODE_AUTO = 0,
  PERMSIM_MODE_EXACT = 1,
  PERMSIM_MODE_RANDOMIZED = 2
} permsim_mode;

typedef enum permsim_outcome {
  PERMSIM_EXACT_SIMILAR = 0,
  PERMSIM_EPS_ETA_SIMILAR = 1,
  PERMSIM_NOT_SIMILAR = 2
} permsim_outcome;

typedef enum permsim_body {
  PERMSIM_BODY_AA = 0,
  PERMSIM_BODY_AB = 1,
  PERMSIM_BODY_BB = 2,
  PERMSIM_BODY_BALL = 3
} permsim_body;

typedef struct permsim_options {
  double eps;        /* relative volume tolerance, in (0,1) */
  double eta;        /* confidence parameter, in (0,1) */
  uint64_t seed;     /* master seed; consulted only when has_seed != 0 */
  int has_seed;      /* 0: library draws a seed and reports it */
  int mode;          /* permsim_mode */
  int schedule_n;    /* radius-schedule granularity; 0: commutant dimension */
  uint64_t samples;  /* per-phase sample override; 0: built-in formula */
  int threads;       /* worker threads for the sampling stage */
} permsim_options;

/* Fill opts with the defaults (eps=0.1, eta=0.05, auto mode, 1 thread). */
PERMSIM_API void permsim_options_init(permsim_options* opts);

PERMSIM_API permsim_status permsim_graph_parse(const char* text, int format,
                                               permsim_graph** out);
PERMSIM_API void permsim_graph_free(permsim_graph* g);
PERMSIM_API int permsim_graph_order(const permsim_graph* g);
PERMSIM_API int64_t permsim_graph_entry(const permsim_graph* g, int i, int j);
PERMSIM_API permsim_status permsim_graph_serialize(const permsim_graph* g,
                                                   int format, char** out);

/* klass receives a permsim_validation; degree the common row sum when
 * regular (untouched otherwise). */
PERMSIM_API permsim_status permsim_graph_validate(const permsim_graph* g,
                                                  int* klass, int64_t* degree);

/* Canonical basis and structure-tensor dump of the minimal coherent
 * algebra containing the graph. */
PERMSIM_API permsim_status permsim_refine_dump(const permsim_graph* g,
                                               char** out);

/* Full similarity decision. outcome receives a permsim_outcome; the JSON
 * report carries stage, witness, schedule and per-phase volume data. */
PERMSIM_API permsim_status permsim_decide(const permsim_graph* a,
                                          const permsim_graph* b,
                                          const permsim_options* opts,
                                          int* outcome, char** report_json);

/* Volume profile of one body. body selects P(A,A), P(A,B), P(B,B) or a
 * pure ball; for PERMSIM_BODY_BALL the graphs are ignored and ball_dim /
 * ball_n fix the dimension and the radius schedule. b may be NULL unless
 * body is PERMSIM_BODY_AB or PERMSIM_BODY_BB. */
PERMSIM_API permsim_status permsim_volume_report(const permsim_graph* a,
                                                 const permsim_graph* b,
                                                 int body, int ball_dim,
                                                 int ball_n,
                                                 const permsim_options* opts,
                                                 char** report_json);

/* Exhaustive witness search, capped at 12 vertices. found receives 0/1. */
PERMSIM_API permsim_status permsim_oracle(const permsim_graph* a,
                                          const permsim_graph* b, int* found,
                                          char** report_json);

PERMSIM_API const char* permsim_status_name(int status);
PERMSIM_API const char* permsim_last_error(void);
PERMSIM_API void permsim_string_free(char* s);
PERMSIM_API const char* permsim_version(void);

#ifdef __cplusplus
}
#endif

#endif /* PERMSIM_H */
