#ifndef SIGNFLOW_H
#define SIGNFLOW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The non-zero values shared with the command line keep the
 * same meaning there.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_HYPOTHESIS_FAILED = 2,
  SF_STATUS_ABSENT = 3,
  SF_STATUS_BUDGET = 4,
  SF_STATUS_INPUT_ERROR = 5,
  SF_STATUS_NULL_POINTER = 6,
  SF_STATUS_INTERNAL_ERROR = 10,
  SF_STATUS_PANIC = 11,
} SfStatus;

/**
 * An integer flow, indexed by edge id.
 */
typedef struct SfFlow SfFlow;

/**
 * A signed graph.
 */
typedef struct SfGraph SfGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/**
 * A graph with `n` vertices and no edges.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum SfStatus sf_graph_new(size_t n, struct SfGraph **out);

/**
 * Parses SGF text. Parse errors carry the line number in the message.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string.
 */
enum SfStatus sf_graph_parse_sgf(const char *text, struct SfGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void sf_graph_free(struct SfGraph *g);

/**
 * Appends an edge `a b` with the next free id, written to `out_id`.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_graph_add_edge(struct SfGraph *g,
                                size_t a,
                                size_t b,
                                bool negative,
                                size_t *out_id);

/**
 * Vertex count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t sf_graph_vertex_count(const struct SfGraph *g);

/**
 * Edge count, or 0 for null.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t sf_graph_edge_count(const struct SfGraph *g);

/**
 * The graph as SGF text. Free the result with [`sf_string_free`].
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_graph_to_sgf(const struct SfGraph *g, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sf_string_free(char *s);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_graph_is_balanced(const struct SfGraph *g, bool *out);

/**
 * Every edge lies in a signed circuit.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_graph_is_flow_admissible(const struct SfGraph *g, bool *out);

/**
 * A nowhere-zero 8-flow. Fails with [`SfStatus::HypothesisFailed`] when
 * the graph is not flow-admissible or its underlying graph has no
 * nowhere-zero 4-flow.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_eight_flow(const struct SfGraph *g, struct SfFlow **out);

/**
 * Exhaustive search for a nowhere-zero `k`-flow. A `node_limit` of 0 uses
 * the default budget. `*out` is left null unless a flow is found.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SfStatus sf_oracle_flow(const struct SfGraph *g,
                             int64_t k,
                             uint64_t node_limit,
                             struct SfFlow **out);

/**
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void sf_flow_free(struct SfFlow *f);

/**
 * Number of edges carrying a value, or 0 for null.
 *
 * # Safety
 * `f` must be null or a live flow handle.
 */
size_t sf_flow_len(const struct SfFlow *f);

/**
 * Value on edge `edge` in the canonical frame.
 *
 * # Safety
 * `f` must be a live flow handle.
 */
enum SfStatus sf_flow_get(const struct SfFlow *f, size_t edge, int64_t *out);

/**
 * Whether `f` is a nowhere-zero `k`-flow on `g`.
 *
 * # Safety
 * `g` and `f` must be live handles.
 */
enum SfStatus sf_flow_verify(const struct SfGraph *g, const struct SfFlow *f, int64_t k, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNFLOW_H */
