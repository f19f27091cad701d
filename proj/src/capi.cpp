#include "halfline/halfline.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/eigenfunction.hpp"
#include "core/errors.hpp"
#include "core/models.hpp"
#include "core/montecarlo.hpp"
#include "core/spectral.hpp"
#include "core/validation.hpp"
#include "core/wiener_hopf.hpp"

using namespace halfline;

namespace {

thread_local std::string g_last_error;
thread_local double g_last_atom = 0.0;
int g_threads = 0; // 0: uninitialized, resolve from env on first use

int resolve_threads() {
    if (g_threads > 0) return g_threads;
    if (const char* env = std::getenv("HALFLINE_SPECTRAL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
hl_status guard(Fn&& fn) {
    try {
        fn();
        return HL_OK;
    } catch (const AtomError& e) {
        g_last_error = e.what();
        g_last_atom = e.location();
        return HL_ERR_ATOM;
    } catch (const ConditionError& e) {
        g_last_error = e.what();
        return HL_ERR_CONDITION;
    } catch (const UnsupportedError& e) {
        g_last_error = e.what();
        return HL_ERR_UNSUPPORTED;
    } catch (const ConvergenceError& e) {
        g_last_error = e.what();
        return HL_ERR_NO_CONVERGENCE;
    } catch (const QuadratureError& e) {
        g_last_error = e.what();
        return HL_ERR_NO_CONVERGENCE;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return HL_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HL_ERR_INTERNAL;
    }
}

QuadratureOptions opts_from_tol(double tol) {
    QuadratureOptions o;
    if (tol > 0.0) {
        o.tol_abs = tol;
        o.tol_rel = tol * 100.0;
    }
    return o;
}

} // namespace

struct hl_model {
    ModelPtr m;
};

struct hl_eigen {
    std::shared_ptr<const Eigenfunction> e;
};

struct hl_grid {
    std::shared_ptr<const SpectralGrid> g;
};

extern "C" {

const char* hl_version(void) { return "halfline 1.0.0"; }

const char* hl_last_error(void) { return g_last_error.c_str(); }

double hl_last_atom_location(void) { return g_last_atom; }

void hl_set_threads(int n) { g_threads = n > 0 ? n : 1; }

hl_status hl_model_parse(const char* text, hl_model** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return HL_ERR_INVALID_ARGUMENT;
    }
    return guard([&] {
        ModelSpec spec;
        try {
            spec = ModelSpec::parse(text);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("model parse: ") + e.what());
        }
        auto m = new hl_model{build_model(spec)};
        *out = m;
    });
}

void hl_model_free(hl_model* m) { delete m; }

hl_status hl_model_to_json(const hl_model* m, char** out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = dup_string(m->m->spec.to_json()); });
}

void hl_string_free(char* s) { std::free(s); }

hl_status hl_model_name(const hl_model* m, char** out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = dup_string(m->m->name); });
}

hl_status hl_model_eval(const hl_model* m, double xi, double* psi,
                        double* dpsi, double* ddpsi) {
    if (!m) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        if (!(xi > 0.0)) throw std::invalid_argument("hl_model_eval: xi must be > 0");
        if (psi) *psi = m->m->eval(xi);
        if (dpsi) *dpsi = m->m->deriv1(xi);
        if (ddpsi) *ddpsi = m->m->deriv2(xi);
    });
}

hl_status hl_model_eval_complex(const hl_model* m, double re, double im,
                                double* out_re, double* out_im) {
    if (!m || !out_re || !out_im) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        if (im == 0.0 && re <= 0.0)
            throw std::invalid_argument("hl_model_eval_complex: argument on the cut (-inf, 0]");
        const cplx v = m->m->eval_complex(cplx{re, im});
        *out_re = v.real();
        *out_im = v.imag();
    });
}

hl_status hl_model_boundary_upper(const hl_model* m, double s, double* out_re,
                                  double* out_im) {
    if (!m || !out_re || !out_im) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        if (!(s > 0.0))
            throw std::invalid_argument("hl_model_boundary_upper: s must be > 0");
        if (!m->m->has_boundary())
            throw UnsupportedError("model carries no closed-form boundary values");
        const cplx v = m->m->boundary_upper(s);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

hl_status hl_model_psi0(const hl_model* m, double* out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    *out = m->m->psi0;
    return HL_OK;
}

int hl_model_is_unbounded(const hl_model* m) {
    return m && m->m->is_unbounded ? 1 : 0;
}

hl_status hl_validate(const hl_model* m, char** report_json, int* all_pass) {
    if (!m) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto rep = validate_model(m->m);
        if (report_json) *report_json = dup_string(report_to_json(rep));
        if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
    });
}

hl_status hl_theta(const hl_model* m, double lambda, double tol, double* out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto ctx = make_wh_context(m->m, lambda, opts_from_tol(tol));
        *out = ctx.theta;
    });
}

hl_status hl_c_lambda(const hl_model* m, double lambda, double* out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto ctx = make_wh_context(m->m, lambda);
        *out = ctx.c_lambda;
    });
}

hl_status hl_psi_dagger_lambda(const hl_model* m, double lambda, double re,
                               double im, double* out_re, double* out_im) {
    if (!m || !out_re || !out_im) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto ctx = make_wh_context(m->m, lambda);
        const cplx v = psi_dagger_lambda(ctx, cplx{re, im});
        *out_re = v.real();
        *out_im = v.imag();
    });
}

hl_status hl_eigen_create(const hl_model* m, double lambda, double tol,
                          hl_eigen** out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        EigenOptions eo;
        eo.quad = opts_from_tol(tol);
        *out = new hl_eigen{std::make_shared<Eigenfunction>(m->m, lambda, eo)};
    });
}

void hl_eigen_free(hl_eigen* e) { delete e; }

hl_status hl_eigen_theta(const hl_eigen* e, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    *out = e->e->theta();
    return HL_OK;
}

hl_status hl_eigen_F(const hl_eigen* e, double x, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->F(x); });
}

hl_status hl_eigen_G(const hl_eigen* e, double x, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->G(x); });
}

hl_status hl_eigen_sin_part(const hl_eigen* e, double x, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->sin_part(x); });
}

hl_status hl_eigen_gamma_density(const hl_eigen* e, double xi, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->gamma_density(xi); });
}

hl_status hl_eigen_gamma_mass(const hl_eigen* e, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->gamma_total_mass(); });
}

hl_status hl_eigen_laplace_F(const hl_eigen* e, double re, double im,
                             double* out_re, double* out_im) {
    if (!e || !out_re || !out_im) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const cplx v = e->e->laplace_F(cplx{re, im});
        *out_re = v.real();
        *out_im = v.imag();
    });
}

hl_status hl_eigen_small_x_asymptote(const hl_eigen* e, double x, double* out) {
    if (!e || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = e->e->small_x_asymptote(x); });
}

hl_status hl_scan_atoms(const hl_model* m, double lambda, double* locs,
                        int cap, int* count) {
    if (!m || !count) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        EigenOptions eo;
        Eigenfunction ef(m->m, lambda, eo);
        const auto& atoms = ef.atom_locations();
        *count = static_cast<int>(atoms.size());
        if (locs)
            for (int i = 0; i < cap && i < *count; ++i) locs[i] = atoms[i];
    });
}

hl_status hl_check_conditions(const hl_model* m, double t,
                              hl_condition_report* out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto r = check_conditions(*m->m, t);
        out->t = r.t;
        out->a1_sup = r.a1_sup;
        out->a1_ok = r.a1_ok;
        out->a2_exponent = r.a2_exponent;
        out->a2_ok = r.a2_ok;
        out->a3_limsup0 = r.a3_limsup0;
        out->a3_limsupinf = r.a3_limsupinf;
        out->a3_ok = r.a3_ok;
        out->pdt_exponent = r.pdt_exponent;
        out->pdt_ok = r.pdt_ok;
        out->fptd_exponent = r.fptd_exponent;
        out->fptd_ok = r.fptd_ok;
        out->proved_regime = r.proved_regime();
        out->grid_min = r.grid_min;
        out->grid_max = r.grid_max;
        out->grid_points = r.grid_points;
    });
}

hl_status hl_survival(const hl_model* m, double t, double x, double tol,
                      double* out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        *out = survival(m->m, t, x, opts_from_tol(tol), resolve_threads());
    });
}

hl_status hl_heat_kernel(const hl_model* m, double t, double x, double y,
                         double tol, double* out, int* clipped) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        bool clip = false;
        *out = heat_kernel(m->m, t, x, y, opts_from_tol(tol),
                           resolve_threads(), &clip);
        if (clipped) *clipped = clip ? 1 : 0;
    });
}

hl_status hl_fpt_density(const hl_model* m, double t, double x, double tol,
                         double* out, int* clipped) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        bool clip = false;
        *out = fpt_density(m->m, t, x, opts_from_tol(tol), resolve_threads(),
                           &clip);
        if (clipped) *clipped = clip ? 1 : 0;
    });
}

hl_status hl_grid_create(const hl_model* m, double t, double freq_hint,
                         double tol, hl_grid** out) {
    if (!m || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        SpectralOptions so;
        so.quad = opts_from_tol(tol);
        so.node_quad = so.quad.tightened(0.01);
        so.freq_hint = freq_hint > 0 ? freq_hint : 1.0;
        so.threads = resolve_threads();
        *out = new hl_grid{std::make_shared<SpectralGrid>(m->m, t, so)};
    });
}

void hl_grid_free(hl_grid* g) { delete g; }

hl_status hl_grid_survival(const hl_grid* g, double x, double* out) {
    if (!g || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = g->g->survival(x); });
}

hl_status hl_grid_heat_kernel(const hl_grid* g, double x, double y,
                              double* out, int* clipped) {
    if (!g || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        bool clip = false;
        *out = g->g->heat_kernel(x, y, &clip);
        if (clipped) *clipped = clip ? 1 : 0;
    });
}

hl_status hl_grid_fpt_density(const hl_grid* g, double x, double* out,
                              int* clipped) {
    if (!g || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        bool clip = false;
        *out = g->g->fpt_density(x, &clip);
        if (clipped) *clipped = clip ? 1 : 0;
    });
}

hl_status hl_grid_size(const hl_grid* g, size_t* out) {
    if (!g || !out) return HL_ERR_INVALID_ARGUMENT;
    *out = g->g->size();
    return HL_OK;
}

hl_status hl_grid_truncation(const hl_grid* g, double* out) {
    if (!g || !out) return HL_ERR_INVALID_ARGUMENT;
    *out = g->g->truncation_lambda();
    return HL_OK;
}

hl_status hl_pi_transform(const hl_model* m, const double* xs,
                          const double* fs, size_t n, double lambda,
                          double tol, double* out) {
    if (!m || !xs || !fs || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        EigenOptions eo;
        eo.quad = opts_from_tol(tol);
        *out = pi_transform(m->m, std::span(xs, n), std::span(fs, n), lambda,
                            eo);
    });
}

hl_status hl_pi_star(const hl_model* m, const double* lambdas,
                     const double* gs, size_t n, double x, double tol,
                     double* out) {
    if (!m || !lambdas || !gs || !out) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        EigenOptions eo;
        eo.quad = opts_from_tol(tol);
        *out = pi_star(m->m, std::span(lambdas, n), std::span(gs, n), x, eo,
                       resolve_threads());
    });
}

hl_status hl_mc_survival(const hl_model* m, double x, double t, long long n,
                         double dt, uint64_t seed, double* value,
                         double* stderr_out) {
    if (!m || !value) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        const auto e = mc_survival(m->m->spec, x, t, n, dt, seed, resolve_threads());
        *value = e.value;
        if (stderr_out) *stderr_out = e.stderr_;
    });
}

hl_status hl_mc_eigen_check(const hl_model* m, double lambda, double x,
                            double t, long long n, double dt, uint64_t seed,
                            double* value, double* stderr_out,
                            double* target) {
    if (!m || !value) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] {
        EigenOptions eo;
        Eigenfunction ef(m->m, lambda, eo);
        const auto e =
            mc_eigen_check(m->m->spec, ef, x, t, n, dt, seed, resolve_threads());
        *value = e.value;
        if (stderr_out) *stderr_out = e.stderr_;
        if (target)
            *target = std::exp(-t * m->m->eval(lambda * lambda)) * ef.F(x);
    });
}

hl_status hl_mc_dump(const hl_model* m, double x, double t, long long n,
                     double dt, uint64_t seed, const char* path) {
    if (!m || !path) return HL_ERR_INVALID_ARGUMENT;
    return guard([&] { mc_dump(m->m->spec, x, t, n, dt, seed, path); });
}

} // extern "C"
