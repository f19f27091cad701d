#include "quadrature.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = 1.57079632679489661923;

// One abscissa of the tanh-sinh rule on (-1,1), stored as the distances to
// the two endpoints (q = 1 - x can be ~1e-270 without cancellation).
struct TsNode {
    double p; // 1 + x
    double q; // 1 - x
    double w; // (pi/2) cosh t / cosh^2((pi/2) sinh t)
};

struct EsNode {
    double r; // x - a = exp((pi/2) sinh t)
    double w; // r * (pi/2) cosh t
};

constexpr double kTsTmax = 6.0;
constexpr double kEsTmax = 5.5; // exp((pi/2) sinh 5.5) ~ 2e83: reaches the
                                // far tail of slowly decaying integrands

void ts_eval(double t, TsNode& out) {
    const double u = kHalfPi * std::sinh(t);
    const double au = std::abs(u);
    // 1 - tanh(|u|) = 2 / (1 + e^{2|u|}), exact near the endpoint
    double far, near_;
    if (au > 350.0) {
        near_ = 0.0;
        far = 2.0;
    } else {
        const double e = std::exp(-2.0 * au);
        near_ = 2.0 * e / (1.0 + e);
        far = 2.0 - near_;
    }
    out.p = (u >= 0) ? far : near_;
    out.q = (u >= 0) ? near_ : far;
    // w = (pi/2) cosh t * sech^2(u); sech^2(u) = 4 e^{-2|u|} / (1+e^{-2|u|})^2
    if (au > 350.0) {
        out.w = 0.0;
    } else {
        const double e = std::exp(-au);
        const double sech = 2.0 * e / (1.0 + e * e);
        out.w = kHalfPi * std::cosh(t) * sech * sech;
    }
}

void es_eval(double t, EsNode& out) {
    const double u = kHalfPi * std::sinh(t);
    const double r = std::exp(u);
    out.r = r;
    out.w = r * kHalfPi * std::cosh(t);
}

// Lazily built node tables.  Level k holds the abscissae new at spacing
// h = 2^-k (level 0: all integer t).
template <typename Node, void (*Eval)(double, Node&), double Tmax>
class LevelTable {
public:
    const std::vector<Node>& level(int k) {
        std::lock_guard<std::mutex> lock(mu_);
        while (static_cast<int>(levels_.size()) <= k) {
            const int next = static_cast<int>(levels_.size());
            std::vector<Node> nodes;
            auto push = [&](double t) {
                Node n;
                Eval(t, n);
                if (n.w > 0.0) nodes.push_back(n);
            };
            if (next == 0) {
                push(0.0);
                for (double t = 1.0; t <= Tmax; t += 1.0) {
                    push(t);
                    push(-t);
                }
            } else {
                // new nodes of the halved lattice: odd multiples of h
                const double h = std::ldexp(1.0, -next);
                for (double t = h; t <= Tmax; t += 2.0 * h) {
                    push(t);
                    push(-t);
                }
            }
            levels_.push_back(std::move(nodes));
        }
        return levels_[k];
    }

private:
    std::mutex mu_;
    std::vector<std::vector<Node>> levels_;
};

LevelTable<TsNode, ts_eval, kTsTmax> g_ts_levels;
LevelTable<EsNode, es_eval, kEsTmax> g_es_levels;

[[noreturn]] void bad_integrand(double x) {
    std::ostringstream os;
    os << "integrand returned NaN/Inf at x = " << x;
    throw QuadratureError(os.str(), x);
}

template <typename T>
struct DeSums {
    T value{};
    double err = std::numeric_limits<double>::infinity();
    int nodes = 0;
    bool converged = false;
};

// Shared refinement loop for tanh-sinh / exp-sinh.  `eval_level` returns the
// weighted sum of the integrand over the nodes new at level k and bumps the
// node counter.  T(h/2) = T(h)/2 + (h/2) * sum over interleaved nodes.
template <typename T, typename LevelSum>
DeSums<T> de_refine(LevelSum&& eval_level, const QuadratureOptions& opt) {
    DeSums<T> out;
    double h = 1.0;
    T cur = eval_level(0, out.nodes) * h;
    out.value = cur;
    T prev = cur;
    for (int k = 1; k <= opt.max_level; ++k) {
        h *= 0.5;
        cur = cur * 0.5 + eval_level(k, out.nodes) * h;
        const double diff = std::abs(cur - prev);
        out.value = cur;
        out.err = diff;
        if (k >= 2 && diff <= opt.tolerance_for(std::abs(cur))) {
            out.converged = true;
            return out;
        }
        prev = cur;
        if (out.nodes >= opt.node_budget) break;
    }
    return out;
}

template <typename T>
DeSums<T> tanh_sinh(const std::function<T(double, double, double)>& f,
                    double a, double b, const QuadratureOptions& opt) {
    const double half = 0.5 * (b - a);
    auto eval_level = [&](int k, int& counter) -> T {
        const auto& nodes = g_ts_levels.level(k);
        T s{};
        for (const auto& n : nodes) {
            const double da = half * n.p;
            const double db = half * n.q;
            const double x = (n.p <= n.q) ? a + da : b - db;
            if (x == a || x == b) continue; // offset below representable step
            const T v = f(x, da, db);
            if (!std::isfinite(std::abs(v))) bad_integrand(x);
            s += v * (n.w * half);
            ++counter;
        }
        return s;
    };
    return de_refine<T>(eval_level, opt);
}

template <typename T>
DeSums<T> exp_sinh(const std::function<T(double, double, double)>& f,
                   double a, const QuadratureOptions& opt) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto eval_level = [&](int k, int& counter) -> T {
        const auto& nodes = g_es_levels.level(k);
        T s{};
        for (const auto& n : nodes) {
            const double x = a + n.r;
            if (x == a) continue;
            const T v = f(x, n.r, inf);
            if (!std::isfinite(std::abs(v))) bad_integrand(x);
            s += v * n.w;
            ++counter;
        }
        return s;
    };
    return de_refine<T>(eval_level, opt);
}

template <typename T, typename Result>
Result de_dispatch(const std::function<T(double, double, double)>& f,
                   double a, double b, const QuadratureOptions& opt) {
    if (std::isnan(a) || std::isnan(b) || !(a < b))
        throw std::invalid_argument("integrate_de: invalid interval");
    DeSums<T> s;
    if (std::isinf(b)) {
        s = exp_sinh<T>(f, a, opt);
    } else {
        s = tanh_sinh<T>(f, a, b, opt);
    }
    Result r;
    r.value = s.value;
    r.abs_error_estimate = s.err;
    r.nodes_used = s.nodes;
    r.converged = s.converged;
    return r;
}

} // namespace

QuadratureResult integrate_de(const std::function<double(double)>& f,
                              double a, double b,
                              const QuadratureOptions& opt) {
    return de_dispatch<double, QuadratureResult>(
        [&](double x, double, double) { return f(x); }, a, b, opt);
}

QuadratureResult integrate_de_ext(
    const std::function<double(double, double, double)>& f,
    double a, double b, const QuadratureOptions& opt) {
    return de_dispatch<double, QuadratureResult>(f, a, b, opt);
}

ComplexQuadratureResult integrate_de_complex_ext(
    const std::function<std::complex<double>(double, double, double)>& f,
    double a, double b, const QuadratureOptions& opt) {
    return de_dispatch<std::complex<double>, ComplexQuadratureResult>(f, a, b,
                                                                      opt);
}

std::vector<DeNode> de_nodes(double a, double b, int level) {
    // The union of levels 0..L is the trapezoid lattice at spacing 2^-L, so
    // every node carries the same final step in its weight.
    std::vector<DeNode> out;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double hL = std::ldexp(1.0, -level);
    if (std::isinf(b)) {
        for (int k = 0; k <= level; ++k) {
            for (const auto& n : g_es_levels.level(k)) {
                const double x = a + n.r;
                if (x == a) continue;
                out.push_back({x, n.w * hL, n.r, inf});
            }
        }
        return out;
    }
    const double half = 0.5 * (b - a);
    for (int k = 0; k <= level; ++k) {
        for (const auto& n : g_ts_levels.level(k)) {
            const double da = half * n.p;
            const double db = half * n.q;
            const double x = (n.p <= n.q) ? a + da : b - db;
            if (x == a || x == b) continue;
            out.push_back({x, n.w * half * hL, da, db});
        }
    }
    return out;
}

namespace {

// Gauss-Legendre by Newton iteration on P_n (cached per order).
struct GaussTable {
    std::vector<double> x, w;
};

const GaussTable& gauss_table(int n) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<GaussTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
    if (!cache[n]) {
        auto t = std::make_unique<GaussTable>();
        t->x.resize(n);
        t->w.resize(n);
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            t->x[i] = -z;
            t->x[n - 1 - i] = z;
            const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
            t->w[i] = wi;
            t->w[n - 1 - i] = wi;
        }
        cache[n] = std::move(t);
    }
    return *cache[n];
}

double gauss_on(const std::function<double(double)>& f, double a, double b,
                int n, int& counter) {
    const auto& t = gauss_table(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mid + half * t.x[i];
        const double v = f(x);
        if (!std::isfinite(v)) bad_integrand(x);
        s += t.w[i] * v;
        ++counter;
    }
    return s * half;
}

// Recursive bisection with a G15 vs two-half-G15 error estimate.
double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double tol, int depth, double& err_acc,
                      int& counter) {
    const double whole = gauss_on(f, a, b, 15, counter);
    const double mid = 0.5 * (a + b);
    const double left = gauss_on(f, a, mid, 15, counter);
    const double right = gauss_on(f, mid, b, 15, counter);
    const double refined = left + right;
    const double err = std::abs(whole - refined);
    if (err <= tol || depth >= 10) {
        err_acc += err;
        return refined;
    }
    return adaptive_gauss(f, a, mid, 0.5 * tol, depth + 1, err_acc, counter) +
           adaptive_gauss(f, mid, b, 0.5 * tol, depth + 1, err_acc, counter);
}

} // namespace

const std::vector<double>& gauss_nodes(int n) { return gauss_table(n).x; }
const std::vector<double>& gauss_weights(int n) { return gauss_table(n).w; }

QuadratureResult integrate_panels(const std::function<double(double)>& f,
                                  double a, double b, double max_panel_width,
                                  const QuadratureOptions& opt) {
    QuadratureResult r;
    if (!(b > a)) return r;
    const int n_panels =
        std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width)));
    const double w = (b - a) / n_panels;
    std::vector<double> parts(n_panels);
    double err = 0.0;
    int counter = 0;
    for (int i = 0; i < n_panels; ++i) {
        const double pa = a + i * w;
        const double pb = (i == n_panels - 1) ? b : pa + w;
        parts[i] = adaptive_gauss(f, pa, pb, opt.tol_abs / n_panels, 0, err,
                                  counter);
    }
    r.value = pairwise_sum(parts);
    r.abs_error_estimate = err;
    r.nodes_used = counter;
    r.converged = err <= opt.tolerance_for(r.value);
    return r;
}

QuadratureResult integrate_oscillatory(const std::function<double(double)>& f,
                                       OscillatorySpec& spec,
                                       const QuadratureOptions& opt) {
    QuadratureResult out;
    if (!(spec.frequency_hint > 0.0))
        throw std::invalid_argument("integrate_oscillatory: frequency_hint must be > 0");
    const double w = kPi / spec.frequency_hint;
    const double env_target = opt.tol_abs / 10.0;

    // Truncation point: envelope(L) = tol/10, doubling then bisection.
    double lo = 0.5 * w, hi = lo;
    bool found = false;
    for (int i = 0; i < 64; ++i) {
        if (spec.envelope(hi) < env_target) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!found) {
        // envelope does not decay within the iteration budget
        out.converged = false;
        out.abs_error_estimate = std::numeric_limits<double>::infinity();
        return out;
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-6 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (spec.envelope(mid) < env_target ? hi : lo) = mid;
    }
    const int n_panels = std::max(1, static_cast<int>(std::ceil(hi / w)));
    const double L = n_panels * w;

    std::vector<double> parts;
    parts.reserve(n_panels);
    double err = 0.0;
    int counter = 0;

    // first panel by tanh-sinh: integrands may be endpoint-singular at 0
    {
        QuadratureOptions o = opt.tightened(1.0 / n_panels);
        auto r = integrate_de(f, 0.0, w, o);
        parts.push_back(r.value);
        err += r.abs_error_estimate;
        counter += r.nodes_used;
    }
    for (int i = 1; i < n_panels; ++i) {
        parts.push_back(adaptive_gauss(f, i * w, (i + 1) * w,
                                       opt.tol_abs / n_panels, 0, err,
                                       counter));
    }

    // tail bound beyond L from the envelope, geometric extrapolation
    const double e0 = spec.envelope(L);
    const double e1 = spec.envelope(L + w);
    double tail = e0 * w;
    if (e1 < e0 && e0 > 0.0) {
        const double ratio = e1 / e0;
        tail = e0 * w / (1.0 - ratio);
    }
    spec.truncation_tail_bound = tail;

    out.value = pairwise_sum(parts);
    out.abs_error_estimate = err + tail;
    out.nodes_used = counter;
    out.converged = out.abs_error_estimate <= opt.tolerance_for(out.value);
    return out;
}

double laplace_of_sampled(std::span<const double> xs,
                          std::span<const double> fs, double xi, double tol) {
    if (xs.size() != fs.size() || xs.size() < 2)
        throw std::invalid_argument("laplace_of_sampled: need matching grids with >= 2 samples");
    if (!(xi > 0.0))
        throw std::invalid_argument("laplace_of_sampled: xi must be > 0");
    double fmax = 0.0;
    for (double v : fs) fmax = std::max(fmax, std::abs(v));
    const double X = xs.back();
    const double tail_bound = fmax * std::exp(-xi * X) / xi;
    if (tail_bound > tol) {
        const double x_req = std::log(std::max(fmax, 1e-300) / (tol * xi)) / xi;
        std::ostringstream os;
        os << "laplace_of_sampled: grid too short for xi = " << xi
           << " and tol = " << tol << "; need X >= " << x_req << " (have "
           << X << ")";
        throw std::invalid_argument(os.str());
    }
    std::vector<double> cells(xs.size() - 1);
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const double g0 = fs[i] * std::exp(-xi * xs[i]);
        const double g1 = fs[i + 1] * std::exp(-xi * xs[i + 1]);
        cells[i] = 0.5 * (g0 + g1) * (xs[i + 1] - xs[i]);
    }
    return pairwise_sum(cells);
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace halfline
