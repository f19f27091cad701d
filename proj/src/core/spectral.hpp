#pragma once

#include <memory>
#include <span>
#include <vector>

#include "eigenfunction.hpp"

namespace halfline {

// Integrability conditions for the heat-kernel, survival and first-passage
// formulas, decided on log grids with tail extrapolation of the local decay
// exponent; booleans carry a 1% safety margin.  a3 implies a1.
struct ConditionReport {
    double t = 0.0;
    double a1_sup = 0.0; // sup xi |psi''| / psi'
    bool a1_ok = false;
    double a2_exponent = 0.0; // extrapolated decay exponent of sqrt(psi'/psi) e^{-t psi}
    bool a2_ok = false;
    double a3_limsup0 = 0.0;
    double a3_limsupinf = 0.0;
    bool a3_ok = false;
    double pdt_exponent = 0.0; // of e^{-t psi(xi^2)}
    bool pdt_ok = false;
    double fptd_exponent = 0.0; // of sqrt(psi' psi) e^{-t psi}
    bool fptd_ok = false;
    double grid_min = 0.0, grid_max = 0.0;
    int grid_points = 0;
    // a3 is the regime in which the survival formula is proved by the
    // simple argument; a1 + a2 outputs outside it are still evaluated.
    bool proved_regime() const { return a3_ok; }
};

ConditionReport check_conditions(const LaplaceExponent& model, double t);

struct SpectralOptions {
    QuadratureOptions quad;      // outer lambda-integral tolerance
    QuadratureOptions node_quad; // per-node eigenfunction tolerance
    double freq_hint = 1.0;      // max oscillation rate (max x, or x+y)
    int first_panel_level = 6;   // tanh-sinh level for the (0, w) panel
    int gauss_order = 21;
    int threads = 1;
};

// Shared lambda-grid for the spectral payloads at fixed t: panels of width
// pi/freq_hint truncated where the permitted envelopes fall below tol/10;
// F_lambda per node is cached, so many x (and x,y pairs) reuse one grid.
class SpectralGrid {
public:
    SpectralGrid(ModelPtr model, double t, SpectralOptions opt = {});

    double t() const { return t_; }
    double truncation_lambda() const { return trunc_lambda_; }
    size_t size() const { return nodes_.size(); }
    std::span<const double> lambda_nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    const ConditionReport& conditions() const { return cond_; }
    const Eigenfunction& eigenfunction(size_t j) const { return *efs_[j]; }

    double survival(double x) const;
    double heat_kernel(double x, double y, bool* clipped = nullptr) const;
    double fpt_density(double x, bool* clipped = nullptr) const;

private:
    ModelPtr model_;
    double t_ = 0.0;
    double trunc_lambda_ = 0.0;
    SpectralOptions opt_;
    ConditionReport cond_;
    std::vector<double> nodes_, weights_;
    std::vector<double> env_;        // e^{-t psi(lambda^2)}
    std::vector<double> sqrt_ratio_; // sqrt(psi'/psi)(lambda^2)
    std::vector<double> sqrt_prod_;  // sqrt(psi' psi)(lambda^2)
    std::vector<EigenPtr> efs_;
};

// Single-shot evaluations (build a private grid sized to the request).
double survival(ModelPtr model, double t, double x,
                const QuadratureOptions& opt = {}, int threads = 1);
double heat_kernel(ModelPtr model, double t, double x, double y,
                   const QuadratureOptions& opt = {}, int threads = 1,
                   bool* clipped = nullptr);
double fpt_density(ModelPtr model, double t, double x,
                   const QuadratureOptions& opt = {}, int threads = 1,
                   bool* clipped = nullptr);

// Pi f(lambda) = int f(x) F_lambda(x) dx for a sampled f (linear
// interpolation between samples, compact support).
double pi_transform(ModelPtr model, std::span<const double> xs,
                    std::span<const double> fs, double lambda,
                    const EigenOptions& opt = {});
// Same with a callable on compact support [a, b].
double pi_transform_fn(ModelPtr model,
                       const std::function<double(double)>& f, double a,
                       double b, double lambda, const EigenOptions& opt = {});

// Pi* g(x) = int g(lambda) F_lambda(x) d lambda for sampled decaying g;
// composite Simpson/trapezoid on the sample grid.
double pi_star(ModelPtr model, std::span<const double> lambdas,
               std::span<const double> gs, double x,
               const EigenOptions& opt = {}, int threads = 1);

} // namespace halfline
