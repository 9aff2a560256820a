/* C interface to the ncplex library. Every function returns an ncp_status;
 * on failure ncp_last_error() describes the problem for the calling thread.
 * Handles are opaque and owned by the caller; release them with the matching
 * destroy function. Strings returned through char** are freed with
 * ncp_free_string. */
#ifndef NCPLEX_NCPLEX_H
#define NCPLEX_NCPLEX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NCP_API __declspec(dllexport)
#else
#define NCP_API __attribute__((visibility("default")))
#endif

typedef struct ncp_plex ncp_plex;
typedef struct ncp_forest ncp_forest;

/* Values match the library's error codes. */
typedef enum {
  NCP_OK = 0,
  NCP_ERR_INVALID_ARGUMENT = 1,
  NCP_ERR_OUT_OF_CHART,
  NCP_ERR_DEPTH_VIOLATION,
  NCP_ERR_DANGLING_POINT,
  NCP_ERR_BAD_STRATUM,
  NCP_ERR_UNSUPPORTED_SHAPE,
  NCP_ERR_NO_REFERENCE_TREE,
  NCP_ERR_BAD_CHILD_ID,
  NCP_ERR_CYCLE_DETECTED,
  NCP_ERR_NOT_CONSTRAINED,
  NCP_ERR_BAD_DIMENSION,
  NCP_ERR_NOT_A_CHILD,
  NCP_ERR_POINT_OUTSIDE_CELL,
  NCP_ERR_DEGENERATE_CELL,
  NCP_ERR_SHAPE_MISMATCH,
  NCP_ERR_ORIENTATION_UNSUPPORTED,
  NCP_ERR_INCONSISTENT_CHILD_ID,
  NCP_ERR_SIZE_MISMATCH,
  NCP_ERR_BAD_CELL,
  NCP_ERR_BAD_MODE,
  NCP_ERR_SPARSITY_VIOLATION,
  NCP_ERR_BAD_FIELD,
  NCP_ERR_LEVEL_OVERFLOW,
  NCP_ERR_UNBALANCED,
  NCP_ERR_PARSE,
  NCP_ERR_VERSION_MISMATCH,
  NCP_ERR_ALREADY_TREED,
  NCP_ERR_IO,
  NCP_ERR_INTERNAL = 99
} ncp_status;

NCP_API const char* ncp_last_error(void);
NCP_API const char* ncp_status_name(ncp_status status);
NCP_API void ncp_free_string(char* s);

/* ---- plex ---------------------------------------------------------------- */

/* stratum_sizes lists counts by height (cells first), num_strata = dim + 1.
 * cone_sizes has one entry per point; cones/orientations are concatenated. */
NCP_API ncp_status ncp_plex_create_from_dag(int num_strata, const int* stratum_sizes,
                                            const int* cone_sizes, const int* cones,
                                            const int* orientations, int coord_dim,
                                            const double* vertex_coords, ncp_plex** out);
NCP_API void ncp_plex_destroy(ncp_plex* plex);

NCP_API ncp_status ncp_plex_read_dag(const char* path, ncp_plex** out);
NCP_API ncp_status ncp_plex_read_dag_string(const char* text, ncp_plex** out);
NCP_API ncp_status ncp_plex_write_dag(const ncp_plex* plex, const char* path);
NCP_API ncp_status ncp_plex_dag_string(const ncp_plex* plex, char** out);
/* field may be NULL; otherwise one scalar per vertex. */
NCP_API ncp_status ncp_plex_write_vtk(const ncp_plex* plex, const char* path,
                                      const double* field, size_t field_size);

NCP_API ncp_status ncp_plex_dimension(const ncp_plex* plex, int* dim);
NCP_API ncp_status ncp_plex_num_points(const ncp_plex* plex, int* n);
NCP_API ncp_status ncp_plex_height_stratum(const ncp_plex* plex, int height, int* begin, int* end);
NCP_API ncp_status ncp_plex_depth_stratum(const ncp_plex* plex, int depth, int* begin, int* end);
/* Writes up to `capacity` entries; *size receives the full cone size.
 * points/orientations may be NULL when capacity is 0. */
NCP_API ncp_status ncp_plex_cone(const ncp_plex* plex, int point, int* points, int* orientations,
                                 int capacity, int* size);
NCP_API ncp_status ncp_plex_support(const ncp_plex* plex, int point, int* points, int capacity,
                                    int* size);
NCP_API ncp_status ncp_plex_closure(const ncp_plex* plex, int point, int* points,
                                    int* orientations, int capacity, int* size);

/* Installs a tree overlay against the named reference tree. parent_section
 * has one 0/1 entry per point; parents/child_ids hold num_constrained entries
 * in chart order. */
NCP_API ncp_status ncp_plex_set_tree(ncp_plex* plex, const char* reference_tree,
                                     const int* parent_section, const int* parents,
                                     const int* child_ids, int num_constrained);
/* *parent = -1 when the point has no parent. */
NCP_API ncp_status ncp_plex_tree_parent(const ncp_plex* plex, int point, int* parent, int* child_id);
NCP_API ncp_status ncp_plex_tree_children(const ncp_plex* plex, int point, int* points,
                                          int capacity, int* size);
NCP_API ncp_status ncp_plex_anchors(const ncp_plex* plex, int point, int* points, int capacity,
                                    int* size);

typedef struct {
  int dimension;
  int coordinate_dimension;
  int num_points;
  int strata[4]; /* by height; unused entries are 0 */
  int num_constrained;
  int duality_holds;
  /* NUL terminated; empty when no reference tree is attached. */
  char reference_tree[64];
} ncp_plex_info;

NCP_API ncp_status ncp_plex_get_info(const ncp_plex* plex, ncp_plex_info* info);

/* ---- mesh generation ------------------------------------------------------ */

/* Unit box with cells[k] divisions along axis k. */
NCP_API ncp_status ncp_generate_box(int dim, int simplex, const int* cells, ncp_plex** out);
NCP_API ncp_status ncp_refine_cell(const ncp_plex* plex, int cell, ncp_plex** out);

/* ---- forest -------------------------------------------------------------- */

NCP_API ncp_status ncp_forest_create_brick(int dim, const int* roots_per_axis, ncp_forest** out);
NCP_API void ncp_forest_destroy(ncp_forest* forest);
/* Return nonzero to refine the leaf. morton_lo/hi are the low and high 64 bits. */
typedef int (*ncp_refine_predicate)(int root, int level, uint64_t morton_lo, uint64_t morton_hi,
                                    void* context);
NCP_API ncp_status ncp_forest_refine(ncp_forest* forest, ncp_refine_predicate predicate,
                                     void* context);
/* Refines every leaf below `level`. */
NCP_API ncp_status ncp_forest_refine_uniform(ncp_forest* forest, int level);
/* Refines the leaf at the origin corner of root 0 `levels` times. */
NCP_API ncp_status ncp_forest_refine_corner(ncp_forest* forest, int levels);
NCP_API ncp_status ncp_forest_balance(ncp_forest* forest);
NCP_API ncp_status ncp_forest_num_leaves(const ncp_forest* forest, int* n);
NCP_API ncp_status ncp_forest_is_balanced(const ncp_forest* forest, int* balanced);
NCP_API ncp_status ncp_forest_to_plex(const ncp_forest* forest, ncp_plex** out);

/* ---- verification --------------------------------------------------------- */

typedef enum { NCP_CONSTRAINTS_COMPUTED = 0, NCP_CONSTRAINTS_IDENTITY = 1 } ncp_constraint_source;

typedef struct {
  const char* element; /* "p1", "p2", "q1" or "q2" */
  ncp_constraint_source constraints;
  double perturb;   /* added to the first constrained coefficient if nonzero */
  double tolerance; /* <= 0 selects the default 1e-9 */
} ncp_verify_options;

typedef struct {
  int local_size;
  int global_size;
  int constrained_dofs;
  int num_modes;
  double residuals[6];
  double max_residual;
  int passed;
} ncp_verify_report;

NCP_API ncp_status ncp_verify(const ncp_plex* plex, const ncp_verify_options* options,
                              ncp_verify_report* report);
/* Constraint matrix of the verification as "row col value" lines. */
NCP_API ncp_status ncp_constraints_coo(const ncp_plex* plex, const ncp_verify_options* options,
                                       char** out);

#ifdef __cplusplus
}
#endif

#endif /* NCPLEX_NCPLEX_H */
