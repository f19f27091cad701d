#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace halfline {

using cplx = std::complex<double>;

// One a*z/(z+b) Stieltjes term of a rational complete Bernstein function.
struct RationalTerm {
    double a = 0.0;
    double b = 1.0;
};

// Model descriptions; `sum` composes children, `scaled` multiplies one child
// by a positive constant.
struct ModelSpec {
    enum class Kind {
        stable,           // psi(x) = x^(alpha/2),        alpha in (0, 2]
        relativistic,     // psi(x) = sqrt(m^2+x) - m,    m > 0
        stable_plus_drift,// psi(x) = x^(alpha/2) + beta x
        gamma,            // psi(x) = log(1+x)
        log_log,          // psi(x) = log(1+log(1+x))
        cp_exponential,   // psi(x) = x/(1+x)
        rational,         // psi(x) = c0 + c1 x + sum a_i x/(x+b_i)
        sum,
        scaled,
    };
    Kind kind = Kind::stable;
    double alpha = 1.0;
    double m = 1.0;
    double beta = 0.0;
    double factor = 1.0; // scaled
    double rational_const = 0.0;
    double rational_drift = 0.0;
    std::vector<RationalTerm> terms;
    std::vector<ModelSpec> components;

    // JSON object, e.g. {"kind":"stable","alpha":1.5}; round-trip lossless.
    std::string to_json() const;
    static ModelSpec from_json(const std::string& text);
    // Compact CLI form: stable:1.5, relativistic:1, stable-drift:1:0.5,
    // gamma, log-log, cp-exp, brownian, rational:5/1,1/5.  JSON accepted too.
    static ModelSpec parse(const std::string& text);
};

// A complete Bernstein function with closed-form derivatives, holomorphic
// extension (principal branch, cut along (-inf, 0]) and upper boundary
// values psi^+(-s) = lim_{eps->0+} psi(-s + i eps).  Immutable once built.
struct LaplaceExponent {
    std::string name;
    ModelSpec spec;
    std::function<double(double)> eval;
    std::function<double(double)> deriv1;
    std::function<double(double)> deriv2;
    std::function<cplx(cplx)> eval_complex;
    std::function<cplx(cplx)> deriv1_complex;
    std::function<cplx(double)> boundary_upper; // empty if unavailable
    bool is_unbounded = true;
    double psi0 = 0.0;
    std::optional<double> rv_order_inf; // regular-variation order at infinity

    bool has_boundary() const { return static_cast<bool>(boundary_upper); }
};

using ModelPtr = std::shared_ptr<const LaplaceExponent>;

// Builds the closed-form model; throws std::invalid_argument on parameters
// outside their declared ranges and UnsupportedError on compositions without
// a closed form.
ModelPtr build_model(const ModelSpec& spec);

struct CheckResult {
    std::string name;
    double worst_margin = 0.0; // >= 0 means the inequality held everywhere
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Numerical CBF checks (monotonicity/concavity, the z f'(z) <= f(z) family,
// half-plane mapping, conjugate symmetry, boundary consistency, derivative
// consistency).  Tolerance 1e-10 relative on each inequality.
ValidationReport validate_cbf(const LaplaceExponent& model,
                              std::span<const double> grid,
                              std::span<const cplx> complex_samples);

// Default grids for validate_cbf.
std::vector<double> default_validation_grid();
std::vector<cplx> default_complex_samples();

} // namespace halfline
