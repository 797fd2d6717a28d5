/* magbend C API: opaque handles over the bending toolkit.
 *
 * Every function returns mb_status; outputs go through pointers. On any
 * failure mb_last_error() returns a thread-local message describing it.
 * Strings and buffers returned through out-parameters are heap allocations
 * owned by the caller; release them with the matching mb_*_free call.
 *
 * Units at this boundary are SI (meters, tesla, radians) unless a name says
 * otherwise. JSON/CSV documents use the mm/mT external conventions.
 */
#ifndef MAGBEND_H
#define MAGBEND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mb_status {
    MB_OK = 0,
    MB_ERR_ARGUMENT = 1,     /* bad argument value or length */
    MB_ERR_DOMAIN = 2,       /* input outside the model's domain */
    MB_ERR_STATE = 3,        /* object not in a usable state */
    MB_ERR_CONFIG = 4,       /* unusable spec/grid configuration */
    MB_ERR_NONCONVERGED = 5, /* reserved for callers mapping convergence flags */
    MB_ERR_IO = 6,           /* file or document failure */
    MB_ERR_EXTRACTION = 7,   /* no usable continuum pixels */
    MB_ERR_INTERNAL = 8
} mb_status;

const char* mb_status_name(mb_status status);
const char* mb_last_error(void);

void mb_string_free(char* s);
void mb_buffer_free(double* buf);
void mb_bytes_free(uint8_t* buf);

/* ---------------- permanent-magnet field ---------------- */

/* Axial H and B at dist_m beyond the N pole face of a cube magnet,
 * by pole-face quadrature of the given order (>= 4). */
mb_status mb_field_axial(double side_m, double remanence_t, double dist_m, int order,
                         double* h_out, double* b_out);

/* Closed-form on-axis oracle for the same geometry. */
mb_status mb_field_axial_closed_form(double side_m, double remanence_t, double dist_m,
                                     double* h_out, double* b_out);

/* Remanence reproducing measured_b_t at dist_m from the pole face. */
mb_status mb_field_calibrate(double side_m, double dist_m, double measured_b_t, int order,
                             double* remanence_out);

mb_status mb_field_uniform(double magnitude_t, double angle_rad, double* bx_out, double* by_out);

/* ---------------- rod + equilibrium ---------------- */

typedef struct mb_rod mb_rod;
typedef struct mb_equilibrium mb_equilibrium;

typedef struct mb_solve_options {
    int32_t continuation_steps; /* default 20 */
    double tolerance;           /* N*m max-norm, default 1e-10 */
    int32_t max_iters;          /* per continuation step, default 500 */
    double base_angle_rad;      /* clamp direction, default 0 */
    double tip_moment_nm;       /* external tip moment, default 0 */
} mb_solve_options;

void mb_solve_options_init(mb_solve_options* opts);

/* Build a discrete rod from a spec JSON document
 * {"name":…, "sections":[{"length_mm":…,"e_MPa":…}x3], "side_mm":…,
 *  "residual_flux_mT":…} at the given resolution (segments per mm). */
mb_status mb_rod_from_json(const char* spec_json, double segments_per_mm, mb_rod** out);
void mb_rod_free(mb_rod* rod);
mb_status mb_rod_segment_count(const mb_rod* rod, int32_t* count_out);
mb_status mb_rod_segment_length(const mb_rod* rod, double* meters_out);

/* Equilibrium under a uniform field; non-convergence is reported in the
 * result handle, not as a status. opts may be NULL for defaults. */
mb_status mb_solve(const mb_rod* rod, double field_t, double field_angle_rad,
                   const mb_solve_options* opts, mb_equilibrium** out);
void mb_equilibrium_free(mb_equilibrium* eq);
mb_status mb_equilibrium_converged(const mb_equilibrium* eq, int32_t* flag_out);
mb_status mb_equilibrium_angle_count(const mb_equilibrium* eq, int32_t* count_out);
/* cap counts doubles; angles need angle_count, centerline 2*(angle_count+1). */
mb_status mb_equilibrium_angles(const mb_equilibrium* eq, double* buf, int32_t cap);
mb_status mb_equilibrium_centerline(const mb_equilibrium* eq, double* xy_interleaved,
                                    int32_t cap);
mb_status mb_equilibrium_energies(const mb_equilibrium* eq, double* bending_j_out,
                                  double* zeeman_j_out);
mb_status mb_equilibrium_gradient_norm(const mb_equilibrium* eq, double* norm_out);
/* JSON document: angles_rad, centerline_mm, energies, converged, iterations. */
mb_status mb_equilibrium_to_json(const mb_equilibrium* eq, char** json_out);

/* ---------------- curve descriptors ---------------- */

/* xy: interleaved pairs in meters. a in 1/m; rms in meters. */
mb_status mb_fit_quadratic(const double* xy, int32_t n_points, double* a_out, double* rms_out);
/* Best-fit circle radius in meters; +infinity for collinear input. */
mb_status mb_bending_radius(const double* xy, int32_t n_points, double* radius_out);
/* Per-joint curvature (1/m); needs angle_count doubles of capacity. */
mb_status mb_curvature_profile(const mb_equilibrium* eq, double* buf, int32_t cap);
/* Turning angle per unit length at interior polyline vertices; n points
 * give n-2 values. */
mb_status mb_polyline_curvature(const double* xy, int32_t n_points, double* buf, int32_t cap,
                                int32_t* n_out);

/* ---------------- surrogate ---------------- */

typedef struct mb_model mb_model;

typedef struct mb_train_options {
    int32_t epochs;       /* default 5000 */
    double learning_rate; /* default 1e-3 */
    uint64_t seed;        /* default 42 */
} mb_train_options;

void mb_train_options_init(mb_train_options* opts);

/* Train from a dataset CSV document (columns mt_mT,e1_MPa,...,a_per_mm),
 * holding out holdout_mt (mT) for testing. report_json_out may be NULL. */
mb_status mb_model_train_csv(const char* dataset_csv, double holdout_mt,
                             const mb_train_options* opts, mb_model** model_out,
                             char** report_json_out);
mb_status mb_model_predict(const mb_model* model, double mt_t, const double e_pa[3],
                           const double l_m[3], double cs_m, double* a_out);
mb_status mb_model_to_json(const mb_model* model, char** json_out);
mb_status mb_model_from_json(const char* json, mb_model** model_out);
void mb_model_free(mb_model* model);

/* ---------------- pipeline ---------------- */

/* grid_json schema: {"specs":[path|object,...], "fields_mT":[...],
 *  "angles_deg":[...]?, "resolution":…?, "solver":{…}?}. Relative spec paths
 * resolve against base_dir (NULL for the process working directory).
 * any_nonconverged_out (optional) is set to 1 when any record failed. */
mb_status mb_sweep_run(const char* grid_json, const char* base_dir, int32_t threads,
                       char** records_json_out, int32_t* any_nonconverged_out);
mb_status mb_library_to_csv(const char* records_json, char** csv_out);
mb_status mb_dataset_generate(const char* grid_json, const char* base_dir, char** csv_out);

/* curves_json: [{"label":…, "points_mm":[[x,y],...]},...]. */
mb_status mb_render_svg(const char* curves_json, int32_t width_px, int32_t height_px,
                        const char* title, char** svg_out);

/* Read a binary P5 PGM; pixels_out is row-major top-first. */
mb_status mb_pgm_read(const char* path, uint8_t** pixels_out, int32_t* width_out,
                      int32_t* height_out);
/* Centerline of the dark region: axis 'x' scans columns, 'y' scans rows.
 * Output points are interleaved mm pairs, root-aligned. */
mb_status mb_extract_centerline(const uint8_t* pixels, int32_t width, int32_t height,
                                int32_t threshold, char axis, double mm_per_pixel,
                                double** xy_mm_out, int32_t* n_points_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MAGBEND_H */
