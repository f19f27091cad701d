#include "eigenfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lgamma_1p(double a) { return std::lgamma(1.0 + a); }

} // namespace

Eigenfunction::Eigenfunction(ModelPtr model, double lambda, EigenOptions opt)
    : ctx_(make_wh_context(std::move(model), lambda, opt.quad)), opt_(opt) {
    use_boundary_ = ctx_.model->has_boundary() && !opt_.force_eps_fallback;
    if (ctx_.model->has_boundary()) scan_atoms();
    build_table();
}

void Eigenfunction::scan_atoms() {
    const auto& m = *ctx_.model;
    const double scale = std::max(1.0, ctx_.lambda);
    const int n = 720;
    auto h = [&](double xi) { return ctx_.psi_l2 - m.boundary_upper(xi * xi).real(); };
    auto im_at = [&](double xi) { return m.boundary_upper(xi * xi).imag(); };
    double xi_prev = 1e-6 * scale;
    double h_prev = h(xi_prev);
    double im_max = std::abs(im_at(xi_prev));
    for (int i = 1; i <= n; ++i) {
        const double xi = 1e-6 * scale * std::pow(1e12, double(i) / n);
        const double hv = h(xi);
        im_max = std::max(im_max, std::abs(im_at(xi)));
        const bool finite = std::isfinite(hv) && std::isfinite(h_prev);
        if (finite && hv * h_prev < 0.0) {
            double lo = xi_prev, hi = xi, hlo = h_prev;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double hm = h(mid);
                if (!std::isfinite(hm)) break;
                if (hm * hlo <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    hlo = hm;
                }
            }
            const double root = 0.5 * (lo + hi);
            const double hroot = h(root);
            const double im_root = im_at(root);
            const double mag = std::max(1.0, std::abs(ctx_.psi_l2));
            // genuine zero of psi(lambda^2) - psi^+(-xi^2), not a pole
            // crossing, and a vanishing imaginary part
            if (std::isfinite(hroot) && std::abs(hroot) < 1e-5 * mag &&
                std::abs(im_root) < 1e-8 * mag)
                atoms_.push_back(root);
        }
        xi_prev = xi;
        h_prev = hv;
    }
    const double psc = std::max(std::abs(ctx_.psi_l2), 1.0);
    gamma_zero_ = atoms_.empty() && im_max <= 1e-14 * psc;
}

double Eigenfunction::gamma_density_boundary(double xi) const {
    const auto& m = *ctx_.model;
    const cplx bu = m.boundary_upper(xi * xi);
    const cplx den = cplx{ctx_.psi_l2, 0.0} - bu;
    const double im = (ctx_.lambda * ctx_.dpsi_l2 / den).imag();
    const double dag = psi_dagger_lambda(ctx_, xi);
    return std::sqrt(ctx_.psi_lambda_l2) / (kPi * dag) * im;
}

double Eigenfunction::gamma_density_eps_limit(double xi) const {
    const auto& m = *ctx_.model;
    const double x2 = xi * xi;
    double v[3];
    for (int k = 0; k < 3; ++k) {
        const double eps = std::pow(10.0, -4 - k) * x2;
        const cplx den = cplx{ctx_.psi_l2, 0.0} - m.eval_complex(cplx{-x2, eps});
        v[k] = (ctx_.lambda * ctx_.dpsi_l2 / den).imag();
    }
    // eps-sequence 1e-4, 1e-5, 1e-6 (relative), Richardson in eps with
    // ratio 10 between successive values
    const double r12 = (10.0 * v[1] - v[0]) / 9.0;
    const double r23 = (10.0 * v[2] - v[1]) / 9.0;
    const double scale = std::max(std::abs(r23), 1e-300);
    if (std::abs(r12 - r23) > 1e-4 * scale &&
        std::abs(r12 - r23) > 1e-14 * ctx_.dpsi_l2) {
        std::ostringstream os;
        os << "gamma_density: eps-limit of psi(-xi^2 + i eps) did not "
              "converge at xi = "
           << xi << " (successive Richardson estimates differ by "
           << std::abs(r12 - r23) / scale << " relative)";
        throw ConvergenceError(os.str(), r23);
    }
    const double dag = psi_dagger_lambda(ctx_, xi);
    return std::sqrt(ctx_.psi_lambda_l2) / (kPi * dag) * r23;
}

double Eigenfunction::gamma_density(double xi) const {
    if (!(xi > 0.0))
        throw std::invalid_argument("gamma_density: xi must be > 0");
    for (double a : atoms_) {
        if (std::abs(xi - a) <= 1e-9 * std::max(1.0, a)) {
            std::ostringstream os;
            os << "gamma_lambda has an atom at xi = " << a
               << " (psi^+(-xi^2) = psi(lambda^2)); the density is singular "
                  "there";
            throw AtomError(os.str(), a);
        }
    }
    if (gamma_zero_) return 0.0;
    if (use_boundary_) return gamma_density_boundary(xi);
    return gamma_density_eps_limit(xi);
}

void Eigenfunction::build_table() {
    if (gamma_zero_ || !atoms_.empty()) return;
    const double lam = ctx_.lambda;
    const double tol =
        0.1 * (opt_.quad.tol_abs + opt_.quad.tol_rel) + 1e-14;
    double prev_mass = -1.0, prev_probe = 0.0;
    const int start_level = opt_.quad.tol_abs >= 1e-9 ? 3 : 4;
    for (int level = start_level; level <= opt_.max_table_level; ++level) {
        // nodes in the scaled variable s = xi / lambda, split at s = 1,
        // so the table tracks the natural scale of gamma_lambda
        auto head = de_nodes(0.0, 1.0, level);
        auto tail = de_nodes(1.0, std::numeric_limits<double>::infinity(), level);
        tab_xi_.clear();
        tab_wg_.clear();
        tab_xi_.reserve(head.size() + tail.size());
        tab_wg_.reserve(head.size() + tail.size());
        for (const auto& n : head) {
            const double xi = lam * n.x;
            if (!(xi > 0.0)) continue;
            tab_xi_.push_back(xi);
            tab_wg_.push_back(lam * n.w * gamma_density(xi));
        }
        for (const auto& n : tail) {
            const double xi = lam * n.x;
            if (!std::isfinite(xi)) continue;
            tab_xi_.push_back(xi);
            tab_wg_.push_back(lam * n.w * gamma_density(xi));
        }
        double mass = 0.0, probe = 0.0;
        const double xp = 1.0 / lam;
        for (size_t j = 0; j < tab_xi_.size(); ++j) {
            mass += tab_wg_[j];
            probe += tab_wg_[j] * std::exp(-xp * tab_xi_[j]);
        }
        gamma_mass_ = mass;
        if (prev_mass >= 0.0 && std::abs(mass - prev_mass) <= tol &&
            std::abs(probe - prev_probe) <= tol)
            return;
        prev_mass = mass;
        prev_probe = probe;
    }
}

double Eigenfunction::G(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("G: x must be >= 0");
    if (!atoms_.empty()) {
        std::ostringstream os;
        os << "G_lambda: gamma_lambda has an atom at xi = " << atoms_[0]
           << "; atom masses are not computed";
        throw AtomError(os.str(), atoms_[0]);
    }
    if (gamma_zero_) return 0.0;
    double s = 0.0;
    for (size_t j = 0; j < tab_xi_.size(); ++j)
        s += tab_wg_[j] * std::exp(-x * tab_xi_[j]);
    return s;
}

double Eigenfunction::sin_part(double x) const {
    return std::sin(ctx_.lambda * x + ctx_.theta);
}

double Eigenfunction::F(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("F: x must be >= 0");
    return sin_part(x) - G(x);
}

cplx Eigenfunction::laplace_F(cplx xi) const {
    if (!(xi.real() > 0.0))
        throw std::invalid_argument("laplace_F: Re xi must be > 0");
    const double lam = ctx_.lambda;
    const cplx i{0.0, 1.0};
    if (std::abs(xi - i * lam) < 1e-9 * lam ||
        std::abs(xi + i * lam) < 1e-9 * lam)
        throw std::invalid_argument("laplace_F: xi too close to the poles at +-i lambda");
    const cplx dag = (xi.imag() == 0.0)
                         ? cplx{psi_dagger_lambda(ctx_, xi.real()), 0.0}
                         : psi_dagger_lambda(ctx_, xi);
    return ctx_.c_lambda * dag / ((lam - i * xi) * (lam + i * xi));
}

namespace {

struct EigenKey {
    const void* model;
    double lambda;
    double tol_abs;
    double tol_rel;
    bool fallback;
    auto operator<=>(const EigenKey&) const = default;
};

std::mutex g_eigen_mu;
std::map<EigenKey, EigenPtr> g_eigen_cache;

} // namespace

EigenPtr cached_eigenfunction(const ModelPtr& model, double lambda,
                              const EigenOptions& opt) {
    const EigenKey key{model.get(), lambda, opt.quad.tol_abs,
                       opt.quad.tol_rel, opt.force_eps_fallback};
    {
        std::lock_guard<std::mutex> lock(g_eigen_mu);
        auto it = g_eigen_cache.find(key);
        if (it != g_eigen_cache.end()) return it->second;
    }
    auto ef = std::make_shared<const Eigenfunction>(model, lambda, opt);
    std::lock_guard<std::mutex> lock(g_eigen_mu);
    if (g_eigen_cache.size() > 50000) g_eigen_cache.clear();
    return g_eigen_cache.emplace(key, std::move(ef)).first->second;
}

double Eigenfunction::small_x_asymptote(double x) const {
    const auto& m = *ctx_.model;
    if (!m.rv_order_inf.has_value() || !m.is_unbounded)
        throw UnsupportedError(
            "small_x_asymptote: model lacks regular-variation metadata or is bounded");
    if (!(x > 0.0))
        throw std::invalid_argument("small_x_asymptote: x must be > 0");
    const double a = *m.rv_order_inf;
    const double arg = std::min(1.0 / (x * x), 1e280);
    const double v = std::sqrt(ctx_.lambda2 * ctx_.dpsi_l2 / m.eval(arg));
    return v * std::exp(-lgamma_1p(a));
}

} // namespace halfline
