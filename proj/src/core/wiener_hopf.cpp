#include "wiener_hopf.hpp"

#include <cmath>
#include <sstream>

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kArgClamp = 1e280; // psi arguments beyond this are clamped
constexpr double kPatchRel = 1e-7;  // removable-singularity patch width

double theta_by_quadrature(const WhContext& ctx);

} // namespace

double psi_lambda(const WhContext& ctx, double xi) {
    if (xi == 0.0) return 1.0;
    if (!(xi >= 0.0))
        throw std::invalid_argument("psi_lambda: xi must be >= 0");
    const double u = xi - ctx.lambda2;
    if (std::abs(u) <= kPatchRel * ctx.lambda2)
        return ctx.psi_lambda_l2 * (1.0 + ctx.taylor_b * u);
    const double dpsi = ctx.psi_l2 - ctx.model->eval(xi);
    if (dpsi == 0.0) {
        std::ostringstream os;
        os << "psi_lambda: psi(xi) == psi(lambda^2) at xi = " << xi
           << " != lambda^2; model is not strictly increasing (not a CBF)";
        throw ConditionError(os.str());
    }
    // grouped to keep intermediates in range when xi/lambda^2 is extreme
    return (-u / dpsi) * (ctx.psi_l2 / ctx.lambda2);
}

// log psi_lambda(xi) computed without forming the (possibly overflowing)
// value: log|xi - l2| - log l2 + log psi(l2) - log|psi(xi) - psi(l2)|.
double log_psi_lambda(const WhContext& ctx, double xi) {
    if (xi == 0.0) return 0.0;
    const double u = xi - ctx.lambda2;
    if (std::abs(u) <= kPatchRel * ctx.lambda2)
        return std::log(ctx.psi_lambda_l2) + std::log1p(ctx.taylor_b * u);
    const double dpsi = ctx.psi_l2 - ctx.model->eval(xi);
    if (dpsi == 0.0)
        throw ConditionError("psi_lambda: model is not strictly increasing (not a CBF)");
    return std::log(std::abs(u)) - std::log(ctx.lambda2) +
           std::log(ctx.psi_l2) - std::log(std::abs(dpsi));
}

cplx psi_lambda(const WhContext& ctx, cplx xi) {
    if (xi == cplx{0.0, 0.0}) return {1.0, 0.0};
    const cplx u = xi - ctx.lambda2;
    if (std::abs(u) <= kPatchRel * ctx.lambda2)
        return ctx.psi_lambda_l2 * (1.0 + ctx.taylor_b * u);
    const cplx den = 1.0 - ctx.model->eval_complex(xi) / ctx.psi_l2;
    return (1.0 - xi / ctx.lambda2) / den;
}

double psi_lambda_deriv(const WhContext& ctx, double xi) {
    const double u = xi - ctx.lambda2;
    if (std::abs(u) <= kPatchRel * ctx.lambda2)
        return ctx.psi_lambda_l2 * ctx.taylor_b;
    const double p = ctx.model->eval(xi);
    const double dp = ctx.model->deriv1(xi);
    const double den = 1.0 - p / ctx.psi_l2;
    const double num = 1.0 - xi / ctx.lambda2;
    return (-den / ctx.lambda2 + num * dp / ctx.psi_l2) / (den * den);
}

double log_psi_lambda_sq(const WhContext& ctx, double zeta) {
    double x;
    if (zeta >= 1e140)
        x = kArgClamp;
    else
        x = std::min(zeta * zeta, kArgClamp);
    return log_psi_lambda(ctx, x);
}

namespace {

// Poisson-type average (1/pi) int_0^inf kern(xi, zeta) g(zeta) dzeta with
// kern = xi / (xi^2 + zeta^2), split at zeta0 and both pieces mapped to
// (0,1); the kernel is kept in the factored form (xi - i zeta)(xi + i zeta)
// so boundary evaluations xi = eps + i y stay accurate next to the pole.
cplx poisson_log_average(const std::function<double(double)>& g, cplx xi,
                         const QuadratureOptions& opt) {
    const double zeta0 = std::abs(xi);
    const cplx i{0.0, 1.0};
    auto piece_a = integrate_de_complex_ext(
        [&](double u, double, double) -> cplx {
            const double zeta = zeta0 * u;
            const cplx kern = xi * zeta0 / ((xi - i * zeta) * (xi + i * zeta));
            return kern * g(zeta);
        },
        0.0, 1.0, opt);
    auto piece_b = integrate_de_complex_ext(
        [&](double s, double, double) -> cplx {
            const double zeta = (s < zeta0 * 1e-140) ? 1e140 : zeta0 / s;
            const cplx kern =
                xi * zeta0 / ((s * xi - i * zeta0) * (s * xi + i * zeta0));
            return kern * g(zeta);
        },
        0.0, 1.0, opt);
    return (piece_a.value + piece_b.value) / kPi;
}

double poisson_log_average_real(const std::function<double(double)>& g,
                                double xi, const QuadratureOptions& opt) {
    auto piece_a = integrate_de_ext(
        [&](double u, double, double) {
            return g(xi * u) / (1.0 + u * u);
        },
        0.0, 1.0, opt);
    auto piece_b = integrate_de_ext(
        [&](double s, double, double) {
            const double zeta = (s < xi * 1e-140) ? 1e140 : xi / s;
            return g(zeta) / (1.0 + s * s);
        },
        0.0, 1.0, opt);
    return (piece_a.value + piece_b.value) / kPi;
}

double theta_by_quadrature(const WhContext& ctx) {
    const double l2 = ctx.lambda2;
    const double b = ctx.taylor_b;
    auto integrand = [&](double z, double, double d) {
        // d = 1 - z exactly; integrand (1-z^2)^-1 log(pl(l2/z^2)/pl(l2 z^2))
        const double omz2 = d * (2.0 - d); // 1 - z^2
        if (d < 1e-8) {
            const double u1 = l2 * omz2 / (z * z);
            const double u2 = -l2 * omz2;
            return (std::log1p(b * u1) - std::log1p(b * u2)) / omz2;
        }
        const double zc = std::max(z, 1e-140);
        const double hi = std::min(l2 / (zc * zc), kArgClamp);
        const double lo = l2 * z * z;
        return (log_psi_lambda(ctx, hi) - log_psi_lambda(ctx, lo)) / omz2;
    };
    QuadratureOptions opt = ctx.quad;
    auto r = integrate_de_ext(integrand, 0.0, 1.0, opt);
    double th = r.value / kPi;
    if (th < 0.0 && th > -1e-8) th = 0.0;
    if (!(th >= 0.0 && th < kPi / 2)) {
        std::ostringstream os;
        os << "theta: phase shift " << th << " outside [0, pi/2) at lambda = "
           << ctx.lambda << " (model or quadrature defect)";
        throw ConditionError(os.str());
    }
    return th;
}

} // namespace

WhContext make_wh_context(ModelPtr model, double lambda,
                          const QuadratureOptions& opt) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("make_wh_context: lambda must be > 0");
    WhContext ctx;
    ctx.model = std::move(model);
    ctx.lambda = lambda;
    ctx.lambda2 = lambda * lambda;
    ctx.quad = opt;
    ctx.psi_l2 = ctx.model->eval(ctx.lambda2);
    ctx.dpsi_l2 = ctx.model->deriv1(ctx.lambda2);
    ctx.ddpsi_l2 = ctx.model->deriv2(ctx.lambda2);
    if (!(ctx.psi_l2 > 0.0))
        throw ConditionError("make_wh_context: psi(lambda^2) must be > 0 (degenerate model)");
    if (!(ctx.dpsi_l2 > 0.0))
        throw ConditionError("make_wh_context: psi'(lambda^2) must be > 0");
    ctx.psi_lambda_l2 = ctx.psi_l2 / (ctx.lambda2 * ctx.dpsi_l2);
    ctx.taylor_b = -ctx.ddpsi_l2 / (2.0 * ctx.dpsi_l2);
    ctx.c_lambda = std::sqrt(ctx.lambda2 * ctx.lambda2 * ctx.dpsi_l2 / ctx.psi_l2);
    ctx.theta = theta_by_quadrature(ctx);
    return ctx;
}

double psi_dagger_lambda(const WhContext& ctx, double xi) {
    if (!(xi > 0.0))
        throw std::invalid_argument("psi_dagger_lambda: xi must be > 0");
    auto g = [&](double zeta) { return log_psi_lambda_sq(ctx, zeta); };
    return std::exp(poisson_log_average_real(g, xi, ctx.quad));
}

cplx psi_dagger_lambda(const WhContext& ctx, cplx xi) {
    if (xi.imag() == 0.0 && xi.real() > 0.0)
        return {psi_dagger_lambda(ctx, xi.real()), 0.0};
    if (!(xi.real() > 0.0))
        throw std::invalid_argument("psi_dagger_lambda: Re xi must be > 0");
    auto g = [&](double zeta) { return log_psi_lambda_sq(ctx, zeta); };
    return std::exp(poisson_log_average(g, xi, ctx.quad));
}

cplx psi_dagger_lambda_boundary(const WhContext& ctx, double y) {
    if (!(y > 0.0))
        throw std::invalid_argument("psi_dagger_lambda_boundary: y must be > 0");
    const double eps = 1e-6 * std::max(y, ctx.lambda);
    const cplx v1 = psi_dagger_lambda(ctx, cplx{eps, y});
    const cplx v2 = psi_dagger_lambda(ctx, cplx{0.5 * eps, y});
    return 2.0 * v2 - v1;
}

cplx psi_dagger(const std::function<double(double)>& psi, cplx xi,
                const QuadratureOptions& opt) {
    if (!(xi.real() > 0.0))
        throw std::invalid_argument("psi_dagger: Re xi must be > 0");
    // integrability pre-check on min(1, zeta^-2) |log psi(zeta)|
    for (double z : {1e6, 1e10, 1e14}) {
        const double lp = std::abs(std::log(psi(z)));
        if (!(lp < 1e3 * std::log(z))) {
            std::ostringstream os;
            os << "psi_dagger: |log psi| grows too fast at zeta = " << z
               << " (log-integrability check failed)";
            throw ConditionError(os.str());
        }
    }
    auto g = [&](double zeta) {
        double x;
        if (zeta >= 1e140)
            x = kArgClamp;
        else if (zeta <= 1e-140)
            x = 1e-280;
        else
            x = zeta * zeta;
        return std::log(psi(x));
    };
    if (xi.imag() == 0.0)
        return {std::exp(poisson_log_average_real(g, xi.real(), opt)), 0.0};
    return std::exp(poisson_log_average(g, xi, opt));
}

cplx psi_dagger_ext(const std::function<cplx(cplx)>& psi_complex, cplx xi,
                    const QuadratureOptions& opt) {
    if (xi.imag() == 0.0 && xi.real() <= 0.0)
        throw std::invalid_argument("psi_dagger_ext: xi on the cut (-inf, 0]");
    // eq. dagger2: exp( (1/pi) int_0^inf sqrt(xi) log psi(xi s^2) / (xi + s^2) ds )
    const double s0 = std::sqrt(std::abs(xi));
    const cplx rxi = std::sqrt(xi);
    auto piece_a = integrate_de_complex_ext(
        [&](double u, double, double) -> cplx {
            const double s = std::max(s0 * u, 1e-140);
            return rxi * s0 * std::log(psi_complex(xi * (s * s))) /
                   (xi + s * s);
        },
        0.0, 1.0, opt);
    auto piece_b = integrate_de_complex_ext(
        [&](double t, double, double) -> cplx {
            const double s = (t < s0 * 1e-140) ? 1e140 : s0 / t;
            const double ss = std::min(s * s, kArgClamp);
            return rxi * s0 * std::log(psi_complex(xi * ss)) /
                   (xi * (t * t) + s0 * s0);
        },
        0.0, 1.0, opt);
    return std::exp((piece_a.value + piece_b.value) / kPi);
}

double theta(const WhContext& ctx) { return ctx.theta; }
double c_lambda(const WhContext& ctx) { return ctx.c_lambda; }

} // namespace halfline
