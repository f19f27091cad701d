#pragma once

#include <complex>
#include <functional>

#include "models.hpp"
#include "quadrature.hpp"

namespace halfline {

// Per-lambda context: cached values of psi at lambda^2, the phase shift
// theta_lambda and the normalization c_lambda.  Immutable after
// construction; contexts for distinct lambda may be built in parallel.
struct WhContext {
    ModelPtr model;
    double lambda = 0.0;
    double lambda2 = 0.0;
    double psi_l2 = 0.0;        // psi(lambda^2)
    double dpsi_l2 = 0.0;       // psi'(lambda^2)
    double ddpsi_l2 = 0.0;      // psi''(lambda^2)
    double psi_lambda_l2 = 0.0; // psi_lambda(lambda^2) = psi/(l2 psi')
    double taylor_b = 0.0;      // -psi''/(2 psi'): psi_lambda ~ pl2 (1 + b u)
    double theta = 0.0;         // phase shift in [0, pi/2)
    double c_lambda = 0.0;      // sqrt(lambda^4 psi' / psi)
    QuadratureOptions quad;
};

WhContext make_wh_context(ModelPtr model, double lambda,
                          const QuadratureOptions& opt = {});

// Regularized exponent (1 - xi/lambda^2) / (1 - psi(xi)/psi(lambda^2)),
// continuously extended across the removable singularity at xi = lambda^2.
// psi_lambda(0) = 1 exactly.
double psi_lambda(const WhContext& ctx, double xi);
cplx psi_lambda(const WhContext& ctx, cplx xi);
double psi_lambda_deriv(const WhContext& ctx, double xi);

// log psi_lambda(xi) in log space (the value itself can overflow for tiny
// lambda and huge xi).
double log_psi_lambda(const WhContext& ctx, double xi);
// log psi_lambda(zeta^2), safe for huge zeta (argument clamped where the
// tanh-sinh tail maps beyond representable range).
double log_psi_lambda_sq(const WhContext& ctx, double zeta);

// Wiener-Hopf factor psi_lambda^dagger evaluated by double-exponential
// quadrature of the Poisson-type average of log psi_lambda; the integral is
// split at the kernel scale and both pieces mapped to (0,1).
double psi_dagger_lambda(const WhContext& ctx, double xi);
cplx psi_dagger_lambda(const WhContext& ctx, cplx xi); // Re xi > 0

// Boundary value psi_lambda^dagger(i y) from the right half-plane:
// evaluated at i y + eps with eps = 1e-6 max(y, lambda), one Richardson
// step in eps.
cplx psi_dagger_lambda_boundary(const WhContext& ctx, double y);

// Free-standing dagger transform of an arbitrary positive function on
// (0, infty) (Re xi > 0).  Checks log-integrability by tail sampling.
cplx psi_dagger(const std::function<double(double)>& psi, cplx xi,
                const QuadratureOptions& opt = {});

// Extension off the right half-plane (xi in C minus (-inf,0]) using the
// holomorphic continuation of psi.
cplx psi_dagger_ext(const std::function<cplx(cplx)>& psi_complex, cplx xi,
                    const QuadratureOptions& opt = {});

double theta(const WhContext& ctx);    // cached
double c_lambda(const WhContext& ctx); // cached

} // namespace halfline
