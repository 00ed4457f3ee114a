/*
 * dvar — discrete variational structure toolkit, C API.
 *
 * Opaque-handle interface over the C++ core: decide whether a second-order
 * finite-difference scheme admits a discrete Lagrangian formulation,
 * synthesize the Lagrangian couple when it does, analyze null couples, and
 * run schemes as implicit time steppers.
 *
 * Conventions:
 *   - Every fallible function returns a dvar_status; DVAR_OK means success.
 *   - On failure, dvar_last_error() returns a message for the calling
 *     thread; out-parameters are left untouched.
 *   - Strings returned through char** are heap-allocated; release them with
 *     dvar_string_free(). Handles are released with their *_free function.
 */

#ifndef DVAR_DVAR_H
#define DVAR_DVAR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dvar_op dvar_op;                 /* second-order FD operator */
typedef struct dvar_couple dvar_couple;         /* Lagrangian couple (L-, L+) */
typedef struct dvar_grid dvar_grid;             /* grid function on a partition */
typedef struct dvar_trajectory dvar_trajectory; /* integrator output */

typedef enum {
    DVAR_OK = 0,
    DVAR_ERR_PARSE = 1,   /* malformed expression or file */
    DVAR_ERR_DOMAIN = 2,  /* arithmetic domain error during evaluation */
    DVAR_ERR_INVALID = 3, /* invalid argument / precondition violated */
    DVAR_ERR_IO = 4,      /* file could not be read or written */
    DVAR_ERR_STEP = 5,    /* integrator step failed */
    DVAR_ERR_INTERNAL = 6
} dvar_status;

typedef enum {
    DVAR_VERDICT_SATISFIED = 0, /* also "Null" for null-couple checks */
    DVAR_VERDICT_VIOLATED = 1,  /* also "NotNull" */
    DVAR_VERDICT_INCONCLUSIVE = 2
} dvar_verdict;

/* Last error message for the calling thread ("" when none). */
const char* dvar_last_error(void);
void dvar_string_free(char* s);

/* ---- sampling configuration ------------------------------------------- */

typedef struct {
    uint64_t seed;
    int grids;
    int n_min;           /* >= 4 */
    int n_max;           /* <= 64 */
    const double* h_set; /* NULL for the default {0.05, 0.1, 0.5} */
    int h_count;
    double q_amplitude;
    double t0_min;
    double t0_max;
    double tol_abs;
    double tol_rel;
} dvar_sampling_config;

void dvar_sampling_config_init(dvar_sampling_config* cfg);

/* ---- operators --------------------------------------------------------- */

/* Parses a scheme body over {x, vm, vp, w, t, xi}. label may be NULL. */
dvar_status dvar_op_parse(const char* text, const char* label, dvar_op** out);

/* Direct discretization of a continuous body over {x, v, w, t}:
 * v is replaced by (1-blend)*vm + blend*vp. */
dvar_status dvar_op_discretize(const char* continuous_text, double blend, dvar_op** out);

dvar_status dvar_op_load(const char* path, dvar_op** out);           /* role=fde */
dvar_status dvar_op_load_continuous(const char* path, double blend, dvar_op** out);
dvar_status dvar_op_save(const dvar_op* op, const char* path);
char* dvar_op_to_string(const dvar_op* op); /* expression text; free with dvar_string_free */
void dvar_op_free(dvar_op* op);

/* ---- Lagrangian couples ------------------------------------------------ */

/* Both bodies over {x, v, t, xi}; either may be "0". */
dvar_status dvar_couple_parse(const char* l_minus, const char* l_plus, dvar_couple** out);
dvar_status dvar_couple_load(const char* path, dvar_couple** out);
dvar_status dvar_couple_save(const dvar_couple* c, const char* path);
dvar_status dvar_couple_difference(const dvar_couple* a, const dvar_couple* b,
                                   dvar_couple** out);
/* Quadrature-backed couple from a Helmholtz-satisfying operator. */
dvar_status dvar_synthesize(const dvar_op* op, int quad_order, dvar_couple** out);
void dvar_couple_free(dvar_couple* c);

/* ---- structure checks (JSON reports) ----------------------------------- */

dvar_status dvar_check_helmholtz(const dvar_op* op, const dvar_sampling_config* cfg,
                                 dvar_verdict* verdict, char** json);
dvar_status dvar_check_selfadjoint(const dvar_op* op, const dvar_sampling_config* cfg,
                                   dvar_verdict* verdict, char** json);
dvar_status dvar_verify_synthesis(const dvar_op* op, const dvar_couple* c,
                                  const dvar_sampling_config* cfg, dvar_verdict* verdict,
                                  char** json);
dvar_status dvar_null_check(const dvar_couple* c, const dvar_sampling_config* cfg,
                            dvar_verdict* verdict, char** json);
/* Builds the telescoping certificate of a null couple and verifies it. */
dvar_status dvar_null_decompose(const dvar_couple* c, const dvar_sampling_config* cfg,
                                dvar_verdict* verdict, char** json);

/* ---- grid functions ----------------------------------------------------- */

dvar_status dvar_grid_create(double t0, double h, int n, const double* values,
                             dvar_grid** out);
dvar_status dvar_grid_load_csv(const char* path, dvar_grid** out);
dvar_status dvar_grid_save_csv(const dvar_grid* g, const char* path);
void dvar_grid_free(dvar_grid* g);

/* Euler-Lagrange residual of the couple along the grid; JSON
 * {"first_index": 1, "values": [...]}. */
dvar_status dvar_el_residual(const dvar_couple* c, const dvar_grid* g, char** json);

/* ---- integration -------------------------------------------------------- */

typedef struct {
    double newton_tol;
    int max_iter;
    int extrapolate_guess; /* 1: linear extrapolation (default); 0: previous value */
} dvar_step_config;

void dvar_step_config_init(dvar_step_config* cfg);

/* Runs the scheme from Q_0 = q0, Q_1 = q1 over `steps` intervals of size h
 * (steps >= 4). A trajectory is produced even when stepping fails early;
 * inspect dvar_trajectory_complete. */
dvar_status dvar_integrate(const dvar_op* op, double q0, double q1, double t0, double h,
                           int steps, const dvar_step_config* cfg, dvar_trajectory** out);
int dvar_trajectory_complete(const dvar_trajectory* t);
char* dvar_trajectory_to_csv(const dvar_trajectory* t);
void dvar_trajectory_free(dvar_trajectory* t);

/* Runs both schemes on the same seeds and reports per-step deviations as
 * JSON; *identical is 1 when both complete with max deviation <= 1e-12. */
dvar_status dvar_compare(const dvar_op* a, const dvar_op* b, double q0, double q1, double t0,
                         double h, int steps, const dvar_step_config* cfg, int* identical,
                         char** json);

#ifdef __cplusplus
}
#endif

#endif /* DVAR_DVAR_H */
