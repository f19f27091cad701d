/*
 * halfline: spectral toolkit for subordinate Brownian motions killed on the
 * half-line (0, inf).
 *
 * C API over the C++ core: opaque handles, status codes, thread-local error
 * messages.  All functions returning hl_status set the last-error string on
 * failure; output parameters are untouched unless HL_OK is returned.
 */
#ifndef HALFLINE_H
#define HALFLINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HL_API __declspec(dllexport)
#else
#define HL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
    HL_OK = 0,
    HL_ERR_INVALID_ARGUMENT = 1,
    HL_ERR_PARSE = 2,
    HL_ERR_UNSUPPORTED = 3,
    HL_ERR_CONDITION = 4, /* integrability condition failed; message names it */
    HL_ERR_ATOM = 5,      /* gamma_lambda has an atom; see hl_last_atom_location */
    HL_ERR_NO_CONVERGENCE = 6,
    HL_ERR_INTERNAL = 7
} hl_status;

typedef struct hl_model hl_model;
typedef struct hl_eigen hl_eigen;
typedef struct hl_grid hl_grid;

HL_API const char* hl_version(void);

/* Thread-local message describing the most recent failure in this thread. */
HL_API const char* hl_last_error(void);
/* Location of the atom behind the most recent HL_ERR_ATOM in this thread. */
HL_API double hl_last_atom_location(void);

/* Worker cap for internally parallel computations (grids, Monte Carlo).
 * n <= 0 resets to 1.  Falls back to HALFLINE_SPECTRAL_THREADS if never
 * called. */
HL_API void hl_set_threads(int n);

/* ------------------------------------------------------------------ model */

/* Accepts the JSON form {"kind":"stable","alpha":1.5} or the compact form
 * stable:1.5 | relativistic:1 | stable-drift:1:0.5 | gamma | log-log |
 * cp-exp | brownian | rational:5/1,1/5. */
HL_API hl_status hl_model_parse(const char* text, hl_model** out);
HL_API void hl_model_free(hl_model* m);
/* Canonical JSON spec (lossless round-trip); free with hl_string_free. */
HL_API hl_status hl_model_to_json(const hl_model* m, char** out);
HL_API void hl_string_free(char* s);

HL_API hl_status hl_model_name(const hl_model* m, char** out);
HL_API hl_status hl_model_eval(const hl_model* m, double xi, double* psi,
                               double* dpsi, double* ddpsi);
HL_API hl_status hl_model_eval_complex(const hl_model* m, double re, double im,
                                       double* out_re, double* out_im);
/* psi^+(-s): boundary value on the cut from the upper half-plane;
 * HL_ERR_UNSUPPORTED when the model carries no closed-form boundary. */
HL_API hl_status hl_model_boundary_upper(const hl_model* m, double s,
                                         double* out_re, double* out_im);
HL_API hl_status hl_model_psi0(const hl_model* m, double* out);
HL_API int hl_model_is_unbounded(const hl_model* m);

/* Full CBF + Wiener-Hopf invariant suite; JSON report (checks, margins,
 * pass flags).  *all_pass is set to 0/1. */
HL_API hl_status hl_validate(const hl_model* m, char** report_json,
                             int* all_pass);

/* --------------------------------------------------- Wiener-Hopf kernels */

HL_API hl_status hl_theta(const hl_model* m, double lambda, double tol,
                          double* out);
HL_API hl_status hl_c_lambda(const hl_model* m, double lambda, double* out);
/* psi_lambda^dagger(re + i im), Re > 0. */
HL_API hl_status hl_psi_dagger_lambda(const hl_model* m, double lambda,
                                      double re, double im, double* out_re,
                                      double* out_im);

/* ------------------------------------------------------- eigenfunctions */

HL_API hl_status hl_eigen_create(const hl_model* m, double lambda, double tol,
                                 hl_eigen** out);
HL_API void hl_eigen_free(hl_eigen* e);
HL_API hl_status hl_eigen_theta(const hl_eigen* e, double* out);
HL_API hl_status hl_eigen_F(const hl_eigen* e, double x, double* out);
HL_API hl_status hl_eigen_G(const hl_eigen* e, double x, double* out);
HL_API hl_status hl_eigen_sin_part(const hl_eigen* e, double x, double* out);
HL_API hl_status hl_eigen_gamma_density(const hl_eigen* e, double xi,
                                        double* out);
HL_API hl_status hl_eigen_gamma_mass(const hl_eigen* e, double* out);
HL_API hl_status hl_eigen_laplace_F(const hl_eigen* e, double re, double im,
                                    double* out_re, double* out_im);
HL_API hl_status hl_eigen_small_x_asymptote(const hl_eigen* e, double x,
                                            double* out);
/* Atom locations (psi^+(-xi^2) = psi(lambda^2)); returns count, fills up to
 * cap entries. */
HL_API hl_status hl_scan_atoms(const hl_model* m, double lambda, double* locs,
                               int cap, int* count);

/* ------------------------------------------------------------- spectral */

typedef struct hl_condition_report {
    double t;
    double a1_sup;
    int a1_ok;
    double a2_exponent;
    int a2_ok;
    double a3_limsup0;
    double a3_limsupinf;
    int a3_ok;
    double pdt_exponent;
    int pdt_ok;
    double fptd_exponent;
    int fptd_ok;
    int proved_regime; /* = a3_ok */
    double grid_min, grid_max;
    int grid_points;
} hl_condition_report;

HL_API hl_status hl_check_conditions(const hl_model* m, double t,
                                     hl_condition_report* out);

HL_API hl_status hl_survival(const hl_model* m, double t, double x, double tol,
                             double* out);
HL_API hl_status hl_heat_kernel(const hl_model* m, double t, double x,
                                double y, double tol, double* out,
                                int* clipped);
HL_API hl_status hl_fpt_density(const hl_model* m, double t, double x,
                                double tol, double* out, int* clipped);

/* Shared lambda-grid: F_lambda caches reused across many x / (x,y). */
HL_API hl_status hl_grid_create(const hl_model* m, double t, double freq_hint,
                                double tol, hl_grid** out);
HL_API void hl_grid_free(hl_grid* g);
HL_API hl_status hl_grid_survival(const hl_grid* g, double x, double* out);
HL_API hl_status hl_grid_heat_kernel(const hl_grid* g, double x, double y,
                                     double* out, int* clipped);
HL_API hl_status hl_grid_fpt_density(const hl_grid* g, double x, double* out,
                                     int* clipped);
HL_API hl_status hl_grid_size(const hl_grid* g, size_t* out);
HL_API hl_status hl_grid_truncation(const hl_grid* g, double* out);

/* Pi f(lambda) = int f F_lambda for sampled f (linear interpolation,
 * compact support). */
HL_API hl_status hl_pi_transform(const hl_model* m, const double* xs,
                                 const double* fs, size_t n, double lambda,
                                 double tol, double* out);
/* Pi* g(x) = int g(lambda) F_lambda(x) dlambda for sampled decaying g. */
HL_API hl_status hl_pi_star(const hl_model* m, const double* lambdas,
                            const double* gs, size_t n, double x, double tol,
                            double* out);

/* ---------------------------------------------------------- Monte Carlo */

HL_API hl_status hl_mc_survival(const hl_model* m, double x, double t,
                                long long n, double dt, uint64_t seed,
                                double* value, double* stderr_out);
/* Average of F_lambda(X_t) 1{alive}; *target receives
 * e^{-t psi(lambda^2)} F_lambda(x). */
HL_API hl_status hl_mc_eigen_check(const hl_model* m, double lambda, double x,
                                   double t, long long n, double dt,
                                   uint64_t seed, double* value,
                                   double* stderr_out, double* target);
/* Binary dump of per-replica outcomes: little-endian f64 triples
 * (final position, alive flag as 0/1, steps). */
HL_API hl_status hl_mc_dump(const hl_model* m, double x, double t, long long n,
                            double dt, uint64_t seed, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* HALFLINE_H */
