#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"

namespace halfline {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int nodes_used = 0;
    bool converged = false;
};

struct ComplexQuadratureResult {
    std::complex<double> value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    int nodes_used = 0;
    bool converged = false;
};

struct QuadratureOptions {
    double tol_abs = 1e-10;
    double tol_rel = 1e-8;
    int max_level = 12;    // tanh-sinh/exp-sinh refinement cap
    int node_budget = 4000;

    double tolerance_for(double value_scale) const {
        return tol_abs + tol_rel * std::abs(value_scale);
    }
    QuadratureOptions tightened(double factor) const {
        QuadratureOptions o = *this;
        o.tol_abs *= factor;
        o.tol_rel *= factor;
        return o;
    }
};

// Double-exponential quadrature over (a, b); pass b = +infinity for a
// half-line (exp-sinh transform, otherwise tanh-sinh).  Integrable endpoint
// singularities up to logarithmic/algebraic strength are fine.  NaN or Inf
// from the integrand at an interior node is a hard error naming the
// abscissa.
QuadratureResult integrate_de(const std::function<double(double)>& f,
                              double a, double b,
                              const QuadratureOptions& opt = {});

// Extended form: the callback receives the abscissa together with its exact
// distances to both endpoints, so integrands can evaluate 1 - x etc. without
// cancellation next to an endpoint.  dist_b is +inf for half-line integrals.
QuadratureResult integrate_de_ext(
    const std::function<double(double, double, double)>& f,
    double a, double b, const QuadratureOptions& opt = {});

ComplexQuadratureResult integrate_de_complex_ext(
    const std::function<std::complex<double>(double, double, double)>& f,
    double a, double b, const QuadratureOptions& opt = {});

// Fixed-level node/weight table for the same transforms; used where many
// integrals share one set of abscissae (spectral grids, gamma tables).
struct DeNode {
    double x;
    double w;
    double dist_a;
    double dist_b;
};
std::vector<DeNode> de_nodes(double a, double b, int level);

// Gauss-Legendre nodes/weights on (-1, 1), computed once per order.
const std::vector<double>& gauss_nodes(int n);
const std::vector<double>& gauss_weights(int n);

// Envelope-guided quadrature over (0, inf) for integrands that oscillate
// under a decaying envelope: truncation point solves envelope(L) = tol/10,
// panels of width pi/frequency_hint, adaptive Gauss rule per panel, the
// first panel by tanh-sinh (endpoint singularities).
struct OscillatorySpec {
    std::function<double(double)> envelope; // eventually decreasing bound
    double frequency_hint = 1.0;
    double truncation_tail_bound = 0.0;     // filled by the integrator
};

QuadratureResult integrate_oscillatory(const std::function<double(double)>& f,
                                       OscillatorySpec& spec,
                                       const QuadratureOptions& opt = {});

// Adaptive Gauss quadrature on a finite interval (smooth integrands,
// interior refinement only).
QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  double a, double b, double max_panel_width,
                                  const QuadratureOptions& opt = {});

// Laplace transform int_0^inf e^{-xi x} f(x) dx of a sampled function via
// composite trapezoid on the given grid.  Throws if the grid is too short
// for the requested xi and tolerance; the message names the required X.
double laplace_of_sampled(std::span<const double> xs,
                          std::span<const double> fs, double xi,
                          double tol = 1e-8);

// Deterministic pairwise summation (grid order, independent of worker
// count).
double pairwise_sum(std::span<const double> v);

} // namespace halfline
