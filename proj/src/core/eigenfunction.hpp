#pragma once

#include <memory>
#include <vector>

#include "wiener_hopf.hpp"

namespace halfline {

struct EigenOptions {
    QuadratureOptions quad;
    // Use the eps-limit of psi(-xi^2 + i eps) even when closed-form boundary
    // values exist (test hook for the fallback path).
    bool force_eps_fallback = false;
    int max_table_level = 7;
};

// Per-lambda bundle: phase shift, gamma_lambda density, G_lambda (Laplace
// transform of gamma_lambda on a fixed quadrature table) and the
// eigenfunction F_lambda(x) = sin(lambda x + theta) - G_lambda(x).
class Eigenfunction {
public:
    Eigenfunction(ModelPtr model, double lambda, EigenOptions opt = {});

    const WhContext& ctx() const { return ctx_; }
    double lambda() const { return ctx_.lambda; }
    double theta() const { return ctx_.theta; }
    double normalization() const { return ctx_.c_lambda; } // c_lambda
    const std::vector<double>& atom_locations() const { return atoms_; }
    bool gamma_vanishes() const { return gamma_zero_; }

    // density of gamma_lambda at xi > 0 (eq. of Theorem 1 in concise form);
    // throws AtomError within 1e-9 of an atom, UnsupportedError/
    // ConvergenceError on a failed eps-limit fallback
    double gamma_density(double xi) const;
    double gamma_total_mass() const { return gamma_mass_; }

    double G(double x) const; // throws AtomError when gamma has atoms
    double sin_part(double x) const;
    double F(double x) const; // x >= 0; F(0) = sin(theta) - G(0+)

    // closed form c_lambda psi_dagger(xi) / (lambda^2 + xi^2), Re xi > 0
    cplx laplace_F(cplx xi) const;

    // Karamata small-x asymptote Gamma(1+a)^-1 sqrt(lambda^2 psi'(lambda^2)
    // / psi(x^-2)); requires regular-variation metadata and unbounded psi
    double small_x_asymptote(double x) const;

private:
    void scan_atoms();
    void build_table();
    double gamma_density_boundary(double xi) const;
    double gamma_density_eps_limit(double xi) const;

    WhContext ctx_;
    EigenOptions opt_;
    std::vector<double> atoms_;
    bool gamma_zero_ = false;
    bool use_boundary_ = true;
    std::vector<double> tab_xi_;
    std::vector<double> tab_wg_; // weight * gamma_density at the node
    double gamma_mass_ = 0.0;
};

using EigenPtr = std::shared_ptr<const Eigenfunction>;

// Process-wide cache keyed by (model identity, lambda, tolerances): spectral
// grids at different t share one panel layout, so their nodes coincide.
// Thread-safe; misses are built outside the lock.
EigenPtr cached_eigenfunction(const ModelPtr& model, double lambda,
                              const EigenOptions& opt = {});

} // namespace halfline
