#ifndef BUBBLECUT_H
#define BUBBLECUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Zero is success.
 */
typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_NULL_ARGUMENT = 1,
  BC_STATUS_INVALID_ARGUMENT = 2,
  BC_STATUS_GEOMETRY = 3,
  BC_STATUS_CUT = 4,
  BC_STATUS_BUBBLE = 5,
  BC_STATUS_CONVEXIFY = 6,
  BC_STATUS_IO = 7,
  BC_STATUS_PANIC = 8,
} BcStatus;

/*
 Topology codes accepted by [`bc_grid_euclidean`].
 */
typedef enum BcTopology {
  BC_TOPOLOGY_PLANE = 0,
  BC_TOPOLOGY_CYLINDER = 1,
  BC_TOPOLOGY_TORUS = 2,
} BcTopology;

/*
 Which of several minimizers [`bc_solve_bubble`] returns.
 */
typedef enum BcChoice {
  BC_CHOICE_MINIMAL = 0,
  BC_CHOICE_MAXIMAL = 1,
} BcChoice;

typedef struct BcField BcField;

typedef struct BcGrid BcGrid;

typedef struct BcRegion BcRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or an empty string. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *bc_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *bc_version(void);

/*
 Flat grid of `nx × ny` nodes with spacing `h` and lower-left node at
 `(x0, y0)`.

 # Safety
 `out_grid` must be a valid pointer.
 */
enum BcStatus bc_grid_euclidean(uintptr_t nx,
                                uintptr_t ny,
                                double h,
                                double x0,
                                double y0,
                                enum BcTopology topology,
                                struct BcGrid **out_grid);

/*
 Grid from a JSON metric description, e.g.
 `{"name":"poincare_disk","n":128,"half_width":0.84,"disk_radius":0.8}`.

 # Safety
 `json` must be a NUL-terminated string and `out_grid` a valid pointer.
 */
enum BcStatus bc_grid_from_json(const char *json, struct BcGrid **out_grid);

/*
 # Safety
 `grid` must come from this library or be null.
 */
void bc_grid_free(struct BcGrid *grid);

/*
 Node counts and spacing of a grid.

 # Safety
 All pointers must be valid.
 */
enum BcStatus bc_grid_dims(const struct BcGrid *grid, uintptr_t *nx, uintptr_t *ny, double *h);

/*
 Region from a mask of `len = nx·ny` bytes; non-zero means inside.

 # Safety
 `mask` must point to `len` readable bytes.
 */
enum BcStatus bc_region_from_mask(const struct BcGrid *grid,
                                  const uint8_t *mask,
                                  uintptr_t len,
                                  struct BcRegion **out_region);

/*
 # Safety
 `region` must come from this library or be null.
 */
void bc_region_free(struct BcRegion *region);

/*
 Number of nodes in a region.

 # Safety
 Pointers must be valid.
 */
enum BcStatus bc_region_count(const struct BcRegion *region, uintptr_t *count);

/*
 Writes the region as 0/1 bytes into `mask[0..len]`.

 # Safety
 `mask` must point to `len` writable bytes.
 */
enum BcStatus bc_region_copy_mask(const struct BcRegion *region, uint8_t *mask, uintptr_t len);

/*
 Field from `len = nx·ny` values; NaN marks undefined nodes.

 # Safety
 `values` must point to `len` readable doubles.
 */
enum BcStatus bc_field_from_values(const struct BcGrid *grid,
                                   const double *values,
                                   uintptr_t len,
                                   struct BcField **out_field);

/*
 # Safety
 `field` must come from this library or be null.
 */
void bc_field_free(struct BcField *field);

/*
 Writes the field into `values[0..len]`, NaN where undefined.

 # Safety
 `values` must point to `len` writable doubles.
 */
enum BcStatus bc_field_copy_values(const struct BcField *field, double *values, uintptr_t len);

/*
 Global minimizer of perimeter minus the φ-weighted area. `include` and
 `exclude` may be null.

 # Safety
 Non-null pointers must be valid handles; outputs must be writable.
 */
enum BcStatus bc_solve_bubble(const struct BcGrid *grid,
                              const struct BcField *phi,
                              const struct BcRegion *include,
                              const struct BcRegion *exclude,
                              enum BcChoice choice,
                              struct BcRegion **out_region,
                              double *energy,
                              double *perimeter);

/*
 Signed distance to a region, negative inside.

 # Safety
 Pointers must be valid.
 */
enum BcStatus bc_signed_distance(const struct BcGrid *grid,
                                 const struct BcRegion *region,
                                 struct BcField **out_field);

/*
 Checks strict mean-curvature convexity of `f` against `phi_target`.
 `pass` receives 1 or 0.

 # Safety
 Pointers must be valid.
 */
enum BcStatus bc_verify_mean_convex(const struct BcGrid *grid,
                                    const struct BcField *f,
                                    const struct BcField *phi_target,
                                    double grad_floor,
                                    int32_t *pass,
                                    double *min_margin);

/*
 Runs a JSON run configuration, writing artifacts to `out_dir` (or the
 configured directory when null). `exit_code` receives the CLI exit code
 of a completed run: 0 clean, 2 verification failed.

 # Safety
 Strings must be NUL-terminated; `exit_code` must be writable.
 */
enum BcStatus bc_run_config(const char *config_json, const char *out_dir, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUBBLECUT_H */
