#include "spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Local decay exponent -d log h / d log xi at xi, centered log-step 1.
double local_exponent(const std::function<double(double)>& log_h, double xi) {
    const double hstep = 0.5;
    return log_h(xi * std::exp(-hstep)) - log_h(xi * std::exp(hstep));
}

// Extrapolated exponent: p(xi) = p_inf + c/ln xi + ...; the two-point form
// (p2 L2 - p1 L1)/(L2 - L1) removes the 1/ln term exactly.
double tail_exponent(const std::function<double(double)>& log_h) {
    const double x1 = 1e4, x2 = 1e6;
    const double L1 = std::log(x1), L2 = std::log(x2);
    const double p1 = local_exponent(log_h, x1);
    const double p2 = local_exponent(log_h, x2);
    return (p2 * L2 - p1 * L1) / (L2 - L1);
}

void run_chunks(int threads, size_t n, const std::function<void(size_t, size_t)>& body) {
    if (threads <= 1 || n < 2) {
        body(0, n);
        return;
    }
    const size_t workers = std::min<size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<size_t> next{0};
    const size_t chunk = std::max<size_t>(1, n / (4 * workers));
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const size_t lo = next.fetch_add(chunk);
                if (lo >= n) return;
                body(lo, std::min(n, lo + chunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

ConditionReport check_conditions(const LaplaceExponent& model, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("check_conditions: t must be > 0");
    ConditionReport r;
    r.t = t;
    r.grid_min = 1e-6;
    r.grid_max = 1e6;
    r.grid_points = 481;

    auto ratio = [&](double xi) {
        return xi * std::abs(model.deriv2(xi)) / model.deriv1(xi);
    };
    double sup = 0.0, sup0 = 0.0, supinf = 0.0;
    for (int i = 0; i < r.grid_points; ++i) {
        const double xi =
            r.grid_min * std::pow(r.grid_max / r.grid_min,
                                  double(i) / (r.grid_points - 1));
        const double v = ratio(xi);
        sup = std::max(sup, v);
        if (xi <= 1e-5) sup0 = std::max(sup0, v);
        if (xi >= 1e5) supinf = std::max(supinf, v);
    }
    r.a1_sup = sup;
    r.a1_ok = sup < 2.0 * 0.99;
    r.a3_limsup0 = sup0;
    r.a3_limsupinf = supinf;
    r.a3_ok = sup0 < 0.99 && supinf < 0.99;

    auto log_pdt = [&](double xi) { return -t * model.eval(xi * xi); };
    auto log_a2 = [&](double xi) {
        const double x2 = xi * xi;
        return 0.5 * (std::log(model.deriv1(x2)) - std::log(model.eval(x2))) -
               t * model.eval(x2);
    };
    auto log_fptd = [&](double xi) {
        const double x2 = xi * xi;
        return 0.5 * (std::log(model.deriv1(x2)) + std::log(model.eval(x2))) -
               t * model.eval(x2);
    };
    r.pdt_exponent = tail_exponent(log_pdt);
    r.pdt_ok = r.pdt_exponent > 1.01;
    r.a2_exponent = tail_exponent(log_a2);
    r.a2_ok = r.a2_exponent > 1.01;
    r.fptd_exponent = tail_exponent(log_fptd);
    r.fptd_ok = r.fptd_exponent > 1.01;
    return r;
}

SpectralGrid::SpectralGrid(ModelPtr model, double t, SpectralOptions opt)
    : model_(std::move(model)), t_(t), opt_(opt) {
    if (!(t > 0.0)) throw std::invalid_argument("SpectralGrid: t must be > 0");
    cond_ = check_conditions(*model_, t);
    if (!cond_.pdt_ok && !(cond_.a1_ok && cond_.a2_ok) && !cond_.fptd_ok) {
        std::ostringstream os;
        os << "SpectralGrid: no spectral payload is integrable for "
           << model_->name << " at t = " << t
           << " (e^{-t psi(xi^2)} decay exponent " << cond_.pdt_exponent
           << ", survival exponent " << cond_.a2_exponent << ")";
        throw ConditionError(os.str());
    }

    auto envelope = [&](double lam) {
        const double l2 = lam * lam;
        const double p = model_->eval(l2);
        const double dp = model_->deriv1(l2);
        const double e = std::exp(-t_ * p);
        double env = 0.0;
        if (cond_.pdt_ok) env += e;
        if (cond_.a1_ok && cond_.a2_ok) env += std::sqrt(dp / p) * e;
        if (cond_.fptd_ok) env += std::sqrt(dp * p) * e;
        return env;
    };
    const double w = kPi / opt_.freq_hint;
    const double target = std::max(opt_.quad.tol_abs, 1e-13) / 10.0;
    double lo = w, hi = w;
    bool found = false;
    for (int i = 0; i < 60; ++i) {
        if (envelope(hi) < target) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!found)
        throw ConditionError("SpectralGrid: envelope does not decay; truncation failed");
    for (int i = 0; i < 200 && (hi - lo) > 1e-3 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (envelope(mid) < target ? hi : lo) = mid;
    }
    const int n_panels = std::max(1, static_cast<int>(std::ceil(hi / w)));
    trunc_lambda_ = n_panels * w;

    // first panel: tanh-sinh nodes (integrands can be singular at 0); nodes
    // below 1e-60 carry negligible mass for any decay exponent above ~0.1
    // and would underflow psi(lambda^2)
    for (const auto& n : de_nodes(0.0, w, opt_.first_panel_level)) {
        if (n.x < 1e-60) continue;
        nodes_.push_back(n.x);
        weights_.push_back(n.w);
    }
    const auto& gx = gauss_nodes(opt_.gauss_order);
    const auto& gw = gauss_weights(opt_.gauss_order);
    for (int p = 1; p < n_panels; ++p) {
        const double a = p * w, half = 0.5 * w;
        const double mid = a + half;
        for (int j = 0; j < opt_.gauss_order; ++j) {
            nodes_.push_back(mid + half * gx[j]);
            weights_.push_back(half * gw[j]);
        }
    }

    env_.resize(nodes_.size());
    sqrt_ratio_.resize(nodes_.size());
    sqrt_prod_.resize(nodes_.size());
    efs_.resize(nodes_.size());
    EigenOptions eo;
    eo.quad = opt_.node_quad;
    run_chunks(opt_.threads, nodes_.size(), [&](size_t lo_i, size_t hi_i) {
        for (size_t j = lo_i; j < hi_i; ++j) {
            const double lam = nodes_[j];
            const double l2 = lam * lam;
            const double p = model_->eval(l2);
            const double dp = model_->deriv1(l2);
            env_[j] = std::exp(-t_ * p);
            sqrt_ratio_[j] = std::sqrt(dp / p);
            sqrt_prod_[j] = std::sqrt(dp * p);
            efs_[j] = cached_eigenfunction(model_, lam, eo);
        }
    });
}

double SpectralGrid::survival(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("survival: x must be > 0");
    if (!cond_.a1_ok || !cond_.a2_ok) {
        std::ostringstream os;
        os << "survival: integrability conditions fail for " << model_->name
           << " at t = " << t_ << ": "
           << (!cond_.a1_ok ? "sup xi|psi''|/psi' >= 2 (a1)"
                            : "sqrt(psi'/psi) e^{-t psi} not integrable (a2)");
        throw ConditionError(os.str());
    }
    std::vector<double> terms(nodes_.size());
    for (size_t j = 0; j < nodes_.size(); ++j)
        terms[j] = weights_[j] * sqrt_ratio_[j] * env_[j] * efs_[j]->F(x);
    double v = (2.0 / kPi) * pairwise_sum(terms);
    const double slack =
        10.0 * (opt_.quad.tol_abs + opt_.quad.tol_rel) + 1e-6;
    if (v < -slack || v > 1.0 + slack) {
        std::ostringstream os;
        os << "survival: value " << v << " outside [0,1] beyond tolerance at x = "
           << x << ", t = " << t_;
        throw ConditionError(os.str());
    }
    return std::clamp(v, 0.0, 1.0);
}

double SpectralGrid::heat_kernel(double x, double y, bool* clipped) const {
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("heat_kernel: x, y must be > 0");
    if (!cond_.pdt_ok) {
        std::ostringstream os;
        os << "heat_kernel: e^{-t psi(xi^2)} is not integrable for "
           << model_->name << " at t = " << t_ << " (decay exponent "
           << cond_.pdt_exponent << " <= 1)";
        throw ConditionError(os.str());
    }
    std::vector<double> terms(nodes_.size());
    for (size_t j = 0; j < nodes_.size(); ++j)
        terms[j] = weights_[j] * env_[j] * efs_[j]->F(x) * efs_[j]->F(y);
    double v = (2.0 / kPi) * pairwise_sum(terms);
    if (clipped) *clipped = false;
    if (v < 0.0) {
        const double slack = 10.0 * (opt_.quad.tol_abs + opt_.quad.tol_rel);
        if (v < -slack) {
            std::ostringstream os;
            os << "heat_kernel: negative value " << v
               << " beyond cancellation tolerance at (x, y) = (" << x << ", "
               << y << ")";
            throw ConditionError(os.str());
        }
        if (clipped) *clipped = true;
        v = 0.0;
    }
    return v;
}

double SpectralGrid::fpt_density(double x, bool* clipped) const {
    if (!(x > 0.0)) throw std::invalid_argument("fpt_density: x must be > 0");
    if (!cond_.fptd_ok) {
        std::ostringstream os;
        os << "fpt_density: sqrt(psi' psi) e^{-t psi} is not integrable for "
           << model_->name << " at t = " << t_ << " (decay exponent "
           << cond_.fptd_exponent << " <= 1)";
        throw ConditionError(os.str());
    }
    std::vector<double> terms(nodes_.size());
    for (size_t j = 0; j < nodes_.size(); ++j)
        terms[j] = weights_[j] * sqrt_prod_[j] * env_[j] * efs_[j]->F(x);
    double v = (2.0 / kPi) * pairwise_sum(terms);
    if (clipped) *clipped = false;
    if (v < 0.0) {
        const double slack = 10.0 * (opt_.quad.tol_abs + opt_.quad.tol_rel);
        if (v < -slack) {
            std::ostringstream os;
            os << "fpt_density: negative value " << v
               << " beyond cancellation tolerance at x = " << x;
            throw ConditionError(os.str());
        }
        if (clipped) *clipped = true;
        v = 0.0;
    }
    return v;
}

namespace {

SpectralOptions single_shot_options(const QuadratureOptions& opt,
                                    double freq_hint, int threads) {
    SpectralOptions so;
    so.quad = opt;
    so.node_quad = opt.tightened(0.01);
    so.node_quad.tol_abs = std::max(so.node_quad.tol_abs, 1e-13);
    so.freq_hint = std::max(freq_hint, 0.1);
    so.threads = threads;
    so.first_panel_level = opt.tol_abs <= 1e-7 ? 6 : 4;
    return so;
}

} // namespace

double survival(ModelPtr model, double t, double x,
                const QuadratureOptions& opt, int threads) {
    SpectralGrid g(std::move(model), t, single_shot_options(opt, x, threads));
    return g.survival(x);
}

double heat_kernel(ModelPtr model, double t, double x, double y,
                   const QuadratureOptions& opt, int threads, bool* clipped) {
    SpectralGrid g(std::move(model), t,
                   single_shot_options(opt, x + y, threads));
    return g.heat_kernel(x, y, clipped);
}

double fpt_density(ModelPtr model, double t, double x,
                   const QuadratureOptions& opt, int threads, bool* clipped) {
    SpectralGrid g(std::move(model), t, single_shot_options(opt, x, threads));
    return g.fpt_density(x, clipped);
}

double pi_transform_fn(ModelPtr model,
                       const std::function<double(double)>& f, double a,
                       double b, double lambda, const EigenOptions& opt) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("pi_transform: lambda must be > 0");
    if (!(b > a && a >= 0.0))
        throw std::invalid_argument("pi_transform: bad support interval");
    auto ef = cached_eigenfunction(model, lambda, opt);
    const double panel = 0.5 * kPi / std::max(lambda, 1.0);
    auto r = integrate_panels(
        [&](double x) { return f(x) * ef->F(std::max(x, 0.0)); }, a, b, panel,
        opt.quad);
    return r.value;
}

double pi_transform(ModelPtr model, std::span<const double> xs,
                    std::span<const double> fs, double lambda,
                    const EigenOptions& opt) {
    if (xs.size() != fs.size() || xs.size() < 2)
        throw std::invalid_argument("pi_transform: need matching sample arrays");
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw std::invalid_argument("pi_transform: xs must be increasing");
    if (!(xs.front() >= 0.0))
        throw std::invalid_argument("pi_transform: support must lie in [0, inf)");
    auto efp = cached_eigenfunction(model, lambda, opt);
    const Eigenfunction& ef = *efp;
    // integrate the piecewise-linear interpolant against F_lambda exactly up
    // to the Gauss rule; subdivide when a cell spans a sizable part of an
    // oscillation period
    const auto& gx = gauss_nodes(5);
    const auto& gw = gauss_weights(5);
    std::vector<double> cells(xs.size() - 1, 0.0);
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        const double f0 = fs[i], f1 = fs[i + 1];
        const int sub = std::max(
            1, static_cast<int>(std::ceil((x1 - x0) * lambda * 3.0 / kPi)));
        double acc = 0.0;
        for (int s = 0; s < sub; ++s) {
            const double a = x0 + (x1 - x0) * s / sub;
            const double b = x0 + (x1 - x0) * (s + 1) / sub;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int j = 0; j < 5; ++j) {
                const double x = mid + half * gx[j];
                const double fv = f0 + (f1 - f0) * (x - x0) / (x1 - x0);
                acc += half * gw[j] * fv * ef.F(x);
            }
        }
        cells[i] = acc;
    }
    return pairwise_sum(cells);
}

double pi_star(ModelPtr model, std::span<const double> lambdas,
               std::span<const double> gs, double x, const EigenOptions& opt,
               int threads) {
    if (lambdas.size() != gs.size() || lambdas.size() < 3)
        throw std::invalid_argument("pi_star: need matching sample arrays");
    const size_t n = lambdas.size();
    double gmax = 0.0, gtail = 0.0;
    for (size_t i = 0; i < n; ++i) gmax = std::max(gmax, std::abs(gs[i]));
    gtail = std::max(std::abs(gs[n - 1]), std::abs(gs[n - 2]));
    if (gmax > 0.0 && gtail > 0.05 * gmax)
        throw std::invalid_argument(
            "pi_star: sampled g does not decay over the given lambda range");
    std::vector<double> Fv(n);
    run_chunks(threads, n, [&](size_t lo, size_t hi) {
        for (size_t j = lo; j < hi; ++j) {
            if (!(lambdas[j] > 0.0) || gs[j] == 0.0) {
                Fv[j] = 0.0;
                continue;
            }
            Fv[j] = cached_eigenfunction(model, lambdas[j], opt)->F(x);
        }
    });
    // composite Simpson on uniform grids, trapezoid otherwise
    const double h = lambdas[1] - lambdas[0];
    bool uniform = true;
    for (size_t i = 0; i + 1 < n; ++i)
        if (std::abs((lambdas[i + 1] - lambdas[i]) - h) > 1e-9 * h) {
            uniform = false;
            break;
        }
    if (uniform && n % 2 == 1) {
        double s = gs[0] * Fv[0] + gs[n - 1] * Fv[n - 1];
        for (size_t i = 1; i + 1 < n; ++i)
            s += gs[i] * Fv[i] * (i % 2 == 1 ? 4.0 : 2.0);
        return s * h / 3.0;
    }
    std::vector<double> cells(n - 1);
    for (size_t i = 0; i + 1 < n; ++i)
        cells[i] = 0.5 * (gs[i] * Fv[i] + gs[i + 1] * Fv[i + 1]) *
                   (lambdas[i + 1] - lambdas[i]);
    return pairwise_sum(cells);
}

} // namespace halfline
