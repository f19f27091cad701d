#include "validation.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "eigenfunction.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"
#include "wiener_hopf.hpp"

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;

void add(ValidationReport& rep, const std::string& name, double margin,
         const std::string& detail = "") {
    rep.checks.push_back({name, margin, margin >= -1e-10, detail});
}

std::string at_lambda(const std::string& base, double lam) {
    std::ostringstream os;
    os << base << "[lambda=" << lam << "]";
    return os.str();
}

void wiener_hopf_checks(ValidationReport& rep, const ModelPtr& model,
                        double lam, const QuadratureOptions& opt) {
    const WhContext ctx = make_wh_context(model, lam, opt);

    add(rep, at_lambda("psi_lambda_at_0_is_1", lam),
        1e-12 - std::abs(psi_lambda(ctx, 0.0) - 1.0));
    add(rep, at_lambda("theta_in_range", lam),
        std::min(ctx.theta, kPi / 2 - ctx.theta) / kPi);

    // Prop dagger:prop(d): psi_lambda_dagger(0+) = 1
    const double dag0 = psi_dagger_lambda(ctx, 1e-10 * lam);
    add(rep, at_lambda("psi_dagger_at_0_is_1", lam),
        1e-8 - std::abs(dag0 - 1.0));

    // factorization |psi_dagger(i xi + eps)|^2 = psi_lambda(xi^2)
    {
        double worst = 1.0;
        for (double f : {0.03, 0.3, 1.0, 3.0, 30.0}) {
            const double xi = f * lam;
            const cplx d = psi_dagger_lambda_boundary(ctx, xi);
            const double lhs = std::norm(d);
            const double rhs = psi_lambda(ctx, xi * xi);
            worst = std::min(worst, 1e-6 - std::abs(lhs / rhs - 1.0));
        }
        add(rep, at_lambda("wh_factorization_on_axis", lam), worst);
    }

    // Prop residue: psi_dagger(i lambda) = sqrt(psi_lambda(lambda^2)) e^{i theta}
    {
        const cplx d = psi_dagger_lambda_boundary(ctx, lam);
        const double mod = std::sqrt(ctx.psi_lambda_l2);
        const double m_err = std::abs(std::abs(d) / mod - 1.0);
        const double a_err = std::abs(std::arg(d) - ctx.theta);
        add(rep, at_lambda("residue_modulus", lam), 1e-6 - m_err);
        add(rep, at_lambda("residue_argument", lam), 1e-6 - a_err);
    }

    // theta <= (pi/2) sup xi psi_lambda'/psi_lambda
    {
        double sup = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double xi =
                1e-6 * ctx.lambda2 * std::pow(1e12, double(i) / 80);
            sup = std::max(sup, xi * psi_lambda_deriv(ctx, xi) /
                                    psi_lambda(ctx, xi));
        }
        add(rep, at_lambda("theta_le_halfpi_sup", lam),
            (0.5 * kPi * sup - ctx.theta) / kPi + 1e-9);
    }

    // psi_dagger nondecreasing on (0, inf)
    {
        double worst = 1.0, prev = 0.0;
        for (int i = 0; i <= 24; ++i) {
            const double xi = 1e-3 * lam * std::pow(1e6, double(i) / 24);
            const double v = psi_dagger_lambda(ctx, xi);
            if (i > 0) worst = std::min(worst, (v - prev) / v + 1e-9);
            prev = v;
        }
        add(rep, at_lambda("psi_dagger_nondecreasing", lam), worst);
    }

    // eq. psilambdadaggerest: |psi_dagger(xi)| <= |sqrt(pl2) + sqrt(pl2 b) xi|
    {
        const double c1 = std::sqrt(ctx.psi_lambda_l2);
        const double c2 = std::sqrt(ctx.psi_lambda_l2 * ctx.taylor_b);
        double worst = 1.0;
        for (double f : {0.1, 1.0, 10.0}) {
            const cplx xi{f * lam, 0.4 * f * lam};
            const double lhs = std::abs(psi_dagger_lambda(ctx, xi));
            const double rhs = std::abs(c1 + c2 * xi);
            worst = std::min(worst, (rhs - lhs) / rhs + 1e-9);
        }
        add(rep, at_lambda("psi_dagger_tangent_bound", lam), worst);
    }
}

void eigen_checks(ValidationReport& rep, const ModelPtr& model, double lam,
                  const QuadratureOptions& opt) {
    EigenOptions eo;
    eo.quad = opt;
    Eigenfunction ef(model, lam, eo);
    const auto& ctx = ef.ctx();

    if (!ef.atom_locations().empty()) {
        std::ostringstream os;
        os << ef.atom_locations().size() << " atom(s), first at xi = "
           << ef.atom_locations()[0];
        rep.checks.push_back(
            {at_lambda("gamma_atoms_detected", lam), 0.0, true, os.str()});
        return;
    }

    // gamma >= 0, G within [0, sin theta], nonincreasing and convex
    if (model->has_boundary()) {
        double worst = 1.0;
        for (int i = 0; i <= 40; ++i) {
            const double xi = 1e-3 * lam * std::pow(1e6, double(i) / 40);
            bool near_atom = false;
            for (double a : ef.atom_locations())
                near_atom = near_atom || std::abs(xi - a) < 1e-6 * std::max(1.0, a);
            if (near_atom) continue;
            worst = std::min(worst, ef.gamma_density(xi) + 1e-12);
        }
        add(rep, at_lambda("gamma_density_nonnegative", lam), worst);
    }
    {
        const double st = std::sin(ctx.theta);
        double worst = 1.0, prev = 0.0, prev2 = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double x = 0.02 * (i) / lam;
            const double g = ef.G(x);
            worst = std::min(worst, std::min(g + 1e-12, st - g + 1e-9));
            if (i >= 1) worst = std::min(worst, prev - g + 1e-12); // nonincreasing
            if (i >= 2) worst = std::min(worst, (g - 2 * prev + prev2) + 1e-9); // convex
            prev2 = prev;
            prev = g;
        }
        add(rep, at_lambda("G_bounds_monotone_convex", lam), worst);
    }
    if (model->is_unbounded) {
        // eq. gint: int_0^inf G = (cos theta - sqrt(l^2 psi'/psi)) / lambda
        auto r = integrate_de([&](double x) { return ef.G(x); }, 0.0,
                              std::numeric_limits<double>::infinity(), opt);
        const double target =
            (std::cos(ctx.theta) -
             std::sqrt(ctx.lambda2 * ctx.dpsi_l2 / ctx.psi_l2)) /
            ctx.lambda;
        add(rep, at_lambda("G_mass_identity", lam),
            1e-5 - std::abs(r.value - target));
        add(rep, at_lambda("F_vanishes_at_0", lam),
            1e-6 - std::abs(ef.F(0.0)));
    }
    // eq. lfest: |LF(xi)| <= |lambda + xi| / |lambda^2 + xi^2|
    {
        double worst = 1.0;
        for (double fr : {0.2, 1.0, 5.0})
            for (double fi : {0.0, 0.7, 2.0}) {
                const cplx xi{fr * lam, fi * lam};
                const double lhs = std::abs(ef.laplace_F(xi));
                const double rhs = std::abs(lam + xi) /
                                   std::abs(cplx{lam * lam, 0.0} + xi * xi);
                worst = std::min(worst, (rhs - lhs) / rhs + 1e-9);
            }
        add(rep, at_lambda("laplace_F_bound", lam), worst);
    }
    // Prop lf:0: LF(0+) = sqrt(psi'/psi)(lambda^2)
    {
        const double lf0 = ef.laplace_F(cplx{1e-8 * lam, 0.0}).real();
        const double target = std::sqrt(ctx.dpsi_l2 / ctx.psi_l2);
        add(rep, at_lambda("laplace_F_at_0", lam),
            1e-6 - std::abs(lf0 / target - 1.0));
    }
}

} // namespace

ValidationReport validate_model(ModelPtr model,
                                std::span<const double> lambdas,
                                const QuadratureOptions& opt) {
    ValidationReport rep;
    const auto grid = default_validation_grid();
    const auto zs = default_complex_samples();
    ValidationReport cbf = validate_cbf(*model, grid, zs);
    rep.checks.insert(rep.checks.end(), cbf.checks.begin(), cbf.checks.end());
    for (double lam : lambdas) {
        wiener_hopf_checks(rep, model, lam, opt);
        eigen_checks(rep, model, lam, opt);
    }
    // conditions consistency: a3 implies a1
    const auto c = check_conditions(*model, 1.0);
    add(rep, "a3_implies_a1", (!c.a3_ok || c.a1_ok) ? 0.0 : -1.0);
    return rep;
}

ValidationReport validate_model(ModelPtr model) {
    const std::vector<double> lams{0.5, 2.0};
    return validate_model(std::move(model), lams, QuadratureOptions{});
}

std::string report_to_json(const ValidationReport& rep) {
    nlohmann::json j;
    j["all_pass"] = rep.all_pass();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["margin"] = c.worst_margin;
        e["pass"] = c.pass;
        if (!c.detail.empty()) e["detail"] = c.detail;
        arr.push_back(e);
    }
    j["checks"] = arr;
    return j.dump(2);
}

} // namespace halfline
