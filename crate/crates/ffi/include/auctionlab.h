#ifndef AUCTIONLAB_H
#define AUCTIONLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AlStatus {
  AL_STATUS_OK = 0,
  AL_STATUS_NULL_POINTER = 1,
  AL_STATUS_INVALID_UTF8 = 2,
  AL_STATUS_INVALID_INSTANCE = 3,
  AL_STATUS_ILLEGAL_ACTION = 4,
  AL_STATUS_INVALID_ARGUMENT = 5,
  AL_STATUS_SEARCH_TOO_LARGE = 6,
  AL_STATUS_OUT_OF_RANGE = 7,
  AL_STATUS_PANIC = 8,
} AlStatus;

// Opaque auction instance.
typedef struct AlInstance AlInstance;

// Opaque executed trace; keeps its instance for id lookups.
typedef struct AlTrace AlTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into a new string, or
// returns NULL when the last call succeeded.
char *al_last_error_message(void);

void al_string_free(char *s);

// Parses an instance document (NUL-terminated UTF-8 JSON).
enum AlStatus al_instance_from_json(const char *json, struct AlInstance **out);

void al_instance_free(struct AlInstance *instance);

enum AlStatus al_instance_to_json(const struct AlInstance *instance, char **out);

// Number of keywords, or 0 for NULL.
uintptr_t al_instance_num_keywords(const struct AlInstance *instance);

// Number of bidders, or 0 for NULL.
uintptr_t al_instance_num_bidders(const struct AlInstance *instance);

// Executes `len` actions (`len` must equal the keyword count).
enum AlStatus al_execute(const struct AlInstance *instance,
                         const int64_t *first,
                         const int64_t *second,
                         uintptr_t len,
                         struct AlTrace **out);

enum AlStatus al_solve_top_c(const struct AlInstance *instance, uintptr_t c, struct AlTrace **out);

enum AlStatus al_solve_reverse_match(const struct AlInstance *instance, struct AlTrace **out);

enum AlStatus al_solve_greedy(const struct AlInstance *instance, struct AlTrace **out);

enum AlStatus al_solve_ranking_simulate(const struct AlInstance *instance,
                                        uint64_t seed,
                                        struct AlTrace **out);

// Size of the first-price matching found by Ranking under the ranking drawn
// from `seed`.
enum AlStatus al_ranking_matching_size(const struct AlInstance *instance,
                                       uint64_t seed,
                                       uintptr_t *out);

enum AlStatus al_max_matching_size(const struct AlInstance *instance, uintptr_t *out);

// Optimal 0/1 second-price matching; `max_nodes == 0` uses the default
// search budget.
enum AlStatus al_opt_2pm(const struct AlInstance *instance,
                         uint64_t max_nodes,
                         struct AlTrace **out);

enum AlStatus al_opt_2paa(const struct AlInstance *instance,
                          uint64_t max_nodes,
                          struct AlTrace **out);

void al_trace_free(struct AlTrace *trace);

// Total revenue, or 0 for NULL.
uint64_t al_trace_value(const struct AlTrace *trace);

// Number of steps (one per keyword), or 0 for NULL.
uintptr_t al_trace_len(const struct AlTrace *trace);

// Step `index`: bidder indices (-1 for a skip) and price.
enum AlStatus al_trace_step(const struct AlTrace *trace,
                            uintptr_t index,
                            int64_t *first,
                            int64_t *second,
                            uint64_t *price);

enum AlStatus al_trace_to_json(const struct AlTrace *trace, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUCTIONLAB_H */
