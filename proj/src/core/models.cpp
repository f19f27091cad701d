#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;

// log(1+z) without cancellation for small |z|:
// Re = log|1+z| = (1/2) log1p(2x + |z|^2), Im = atan2(y, 1+x).
cplx clog1p(cplx z) {
    const double x = z.real(), y = z.imag();
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("build_model: " + what);
}

ModelPtr build_stable(double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, "stable requires alpha in (0, 2]");
    const double h = 0.5 * alpha;
    auto m = std::make_shared<LaplaceExponent>();
    std::ostringstream nm;
    nm << "stable(alpha=" << alpha << ")";
    m->name = nm.str();
    m->eval = [h](double x) { return std::pow(x, h); };
    m->deriv1 = [h](double x) { return h * std::pow(x, h - 1.0); };
    m->deriv2 = [h](double x) { return h * (h - 1.0) * std::pow(x, h - 2.0); };
    m->eval_complex = [h](cplx z) { return std::pow(z, h); };
    m->deriv1_complex = [h](cplx z) { return h * std::pow(z, h - 1.0); };
    m->boundary_upper = [h](double s) {
        return std::pow(s, h) * cplx{std::cos(h * kPi), std::sin(h * kPi)};
    };
    m->is_unbounded = true;
    m->psi0 = 0.0;
    m->rv_order_inf = h;
    return m;
}

ModelPtr build_relativistic(double mass) {
    require(mass > 0.0, "relativistic requires m > 0");
    const double m2 = mass * mass;
    auto m = std::make_shared<LaplaceExponent>();
    std::ostringstream nm;
    nm << "relativistic(m=" << mass << ")";
    m->name = nm.str();
    // sqrt(m^2+x) - m written as x / (sqrt(m^2+x) + m): no cancellation
    m->eval = [m2, mass](double x) { return x / (std::sqrt(m2 + x) + mass); };
    m->deriv1 = [m2](double x) { return 0.5 / std::sqrt(m2 + x); };
    m->deriv2 = [m2](double x) { return -0.25 / std::pow(m2 + x, 1.5); };
    m->eval_complex = [m2, mass](cplx z) {
        return z / (std::sqrt(m2 + z) + mass);
    };
    m->deriv1_complex = [m2](cplx z) { return 0.5 / std::sqrt(m2 + z); };
    // branch cut at (-inf, -m^2]
    m->boundary_upper = [m2, mass](double s) -> cplx {
        if (s <= m2) return {std::sqrt(m2 - s) - mass, 0.0};
        return {-mass, std::sqrt(s - m2)};
    };
    m->is_unbounded = true;
    m->psi0 = 0.0;
    m->rv_order_inf = 0.5;
    return m;
}

ModelPtr build_gamma() {
    auto m = std::make_shared<LaplaceExponent>();
    m->name = "gamma";
    m->eval = [](double x) { return std::log1p(x); };
    m->deriv1 = [](double x) { return 1.0 / (1.0 + x); };
    m->deriv2 = [](double x) { return -1.0 / ((1.0 + x) * (1.0 + x)); };
    m->eval_complex = [](cplx z) { return clog1p(z); };
    m->deriv1_complex = [](cplx z) { return 1.0 / (1.0 + z); };
    // branch cut at (-inf, -1]
    m->boundary_upper = [](double s) -> cplx {
        if (s < 1.0) return {std::log1p(-s), 0.0};
        return {std::log(s - 1.0), kPi};
    };
    m->is_unbounded = true;
    m->psi0 = 0.0;
    m->rv_order_inf = 0.0;
    return m;
}

ModelPtr build_log_log() {
    auto m = std::make_shared<LaplaceExponent>();
    m->name = "log_log";
    m->eval = [](double x) { return std::log1p(std::log1p(x)); };
    m->deriv1 = [](double x) {
        return 1.0 / ((1.0 + std::log1p(x)) * (1.0 + x));
    };
    m->deriv2 = [](double x) {
        const double L = std::log1p(x);
        const double d = (1.0 + L) * (1.0 + x);
        return -(2.0 + L) / (d * d);
    };
    m->eval_complex = [](cplx z) { return clog1p(clog1p(z)); };
    m->deriv1_complex = [](cplx z) {
        return 1.0 / ((1.0 + clog1p(z)) * (1.0 + z));
    };
    // cuts: (-inf,-1] from the inner log, and 1+log(1+z)=0 at z = 1/e - 1
    m->boundary_upper = [](double s) -> cplx {
        cplx w;
        if (s < 1.0)
            w = {std::log1p(-s), 0.0};
        else
            w = {std::log(s - 1.0), kPi};
        const cplx v = 1.0 + w;
        if (v.imag() == 0.0 && v.real() < 0.0)
            return {std::log(-v.real()), kPi};
        return std::log(v);
    };
    m->is_unbounded = true;
    m->psi0 = 0.0;
    m->rv_order_inf = 0.0;
    return m;
}

ModelPtr build_cp_exponential() {
    auto m = std::make_shared<LaplaceExponent>();
    m->name = "cp_exponential";
    m->eval = [](double x) { return x / (1.0 + x); };
    m->deriv1 = [](double x) {
        const double d = 1.0 + x;
        return 1.0 / (d * d);
    };
    m->deriv2 = [](double x) {
        const double d = 1.0 + x;
        return -2.0 / (d * d * d);
    };
    m->eval_complex = [](cplx z) { return z / (1.0 + z); };
    m->deriv1_complex = [](cplx z) {
        const cplx d = 1.0 + z;
        return 1.0 / (d * d);
    };
    m->boundary_upper = [](double s) -> cplx { return {-s / (1.0 - s), 0.0}; };
    m->is_unbounded = false;
    m->psi0 = 0.0;
    m->rv_order_inf = std::nullopt;
    return m;
}

ModelPtr build_rational(const ModelSpec& spec) {
    require(spec.rational_const >= 0.0 && spec.rational_drift >= 0.0,
            "rational requires const, drift >= 0");
    require(!spec.terms.empty() || spec.rational_drift > 0.0,
            "rational requires at least one term or a positive drift");
    for (const auto& t : spec.terms)
        require(t.a > 0.0 && t.b > 0.0, "rational terms require a, b > 0");
    const double c0 = spec.rational_const, c1 = spec.rational_drift;
    const auto terms = spec.terms;
    auto m = std::make_shared<LaplaceExponent>();
    std::ostringstream nm;
    nm << "rational(";
    for (size_t i = 0; i < terms.size(); ++i)
        nm << (i ? "+" : "") << terms[i].a << "x/(x+" << terms[i].b << ")";
    nm << ")";
    m->name = nm.str();
    m->eval = [c0, c1, terms](double x) {
        double s = c0 + c1 * x;
        for (const auto& t : terms) s += t.a * x / (x + t.b);
        return s;
    };
    m->deriv1 = [c1, terms](double x) {
        double s = c1;
        for (const auto& t : terms) {
            const double d = x + t.b;
            s += t.a * t.b / (d * d);
        }
        return s;
    };
    m->deriv2 = [terms](double x) {
        double s = 0.0;
        for (const auto& t : terms) {
            const double d = x + t.b;
            s += -2.0 * t.a * t.b / (d * d * d);
        }
        return s;
    };
    m->eval_complex = [c0, c1, terms](cplx z) {
        cplx s = c0 + c1 * z;
        for (const auto& t : terms) s += t.a * z / (z + t.b);
        return s;
    };
    m->deriv1_complex = [c1, terms](cplx z) {
        cplx s = c1;
        for (const auto& t : terms) {
            const cplx d = z + t.b;
            s += t.a * t.b / (d * d);
        }
        return s;
    };
    m->boundary_upper = [c0, c1, terms](double s) -> cplx {
        double v = c0 - c1 * s;
        for (const auto& t : terms) v += -t.a * s / (t.b - s);
        return {v, 0.0};
    };
    m->is_unbounded = c1 > 0.0;
    m->psi0 = c0;
    m->rv_order_inf =
        c1 > 0.0 ? std::optional<double>(1.0) : std::nullopt;
    return m;
}

ModelPtr build_sum(const ModelSpec& spec) {
    require(!spec.components.empty(), "sum requires components");
    std::vector<ModelPtr> parts;
    parts.reserve(spec.components.size());
    for (const auto& c : spec.components) parts.push_back(build_model(c));
    auto m = std::make_shared<LaplaceExponent>();
    std::ostringstream nm;
    nm << "sum(";
    for (size_t i = 0; i < parts.size(); ++i)
        nm << (i ? "," : "") << parts[i]->name;
    nm << ")";
    m->name = nm.str();
    m->eval = [parts](double x) {
        double s = 0.0;
        for (const auto& p : parts) s += p->eval(x);
        return s;
    };
    m->deriv1 = [parts](double x) {
        double s = 0.0;
        for (const auto& p : parts) s += p->deriv1(x);
        return s;
    };
    m->deriv2 = [parts](double x) {
        double s = 0.0;
        for (const auto& p : parts) s += p->deriv2(x);
        return s;
    };
    m->eval_complex = [parts](cplx z) {
        cplx s = 0.0;
        for (const auto& p : parts) s += p->eval_complex(z);
        return s;
    };
    m->deriv1_complex = [parts](cplx z) {
        cplx s = 0.0;
        for (const auto& p : parts) s += p->deriv1_complex(z);
        return s;
    };
    bool have_boundary = true;
    for (const auto& p : parts) have_boundary = have_boundary && p->has_boundary();
    if (have_boundary) {
        m->boundary_upper = [parts](double s) {
            cplx v = 0.0;
            for (const auto& p : parts) v += p->boundary_upper(s);
            return v;
        };
    }
    m->is_unbounded = false;
    m->psi0 = 0.0;
    for (const auto& p : parts) {
        m->is_unbounded = m->is_unbounded || p->is_unbounded;
        m->psi0 += p->psi0;
    }
    m->rv_order_inf = std::nullopt;
    bool all_rv = std::all_of(parts.begin(), parts.end(), [](const ModelPtr& p) {
        return p->rv_order_inf.has_value();
    });
    if (all_rv) {
        double r = 0.0;
        for (const auto& p : parts) r = std::max(r, *p->rv_order_inf);
        m->rv_order_inf = r;
    }
    return m;
}

ModelPtr build_scaled(const ModelSpec& spec) {
    require(spec.factor > 0.0, "scaled requires factor > 0");
    require(spec.components.size() == 1, "scaled requires exactly one inner model");
    ModelPtr inner = build_model(spec.components[0]);
    const double C = spec.factor;
    auto m = std::make_shared<LaplaceExponent>();
    std::ostringstream nm;
    nm << "scaled(" << C << "," << inner->name << ")";
    m->name = nm.str();
    m->eval = [C, inner](double x) { return C * inner->eval(x); };
    m->deriv1 = [C, inner](double x) { return C * inner->deriv1(x); };
    m->deriv2 = [C, inner](double x) { return C * inner->deriv2(x); };
    m->eval_complex = [C, inner](cplx z) { return C * inner->eval_complex(z); };
    m->deriv1_complex = [C, inner](cplx z) {
        return C * inner->deriv1_complex(z);
    };
    if (inner->has_boundary())
        m->boundary_upper = [C, inner](double s) {
            return C * inner->boundary_upper(s);
        };
    m->is_unbounded = inner->is_unbounded;
    m->psi0 = C * inner->psi0;
    m->rv_order_inf = inner->rv_order_inf;
    return m;
}

} // namespace

ModelPtr build_model(const ModelSpec& spec) {
    ModelPtr m;
    switch (spec.kind) {
        case ModelSpec::Kind::stable:
            m = build_stable(spec.alpha);
            break;
        case ModelSpec::Kind::relativistic:
            m = build_relativistic(spec.m);
            break;
        case ModelSpec::Kind::stable_plus_drift: {
            require(spec.alpha > 0.0 && spec.alpha <= 2.0,
                    "stable_plus_drift requires alpha in (0, 2]");
            require(spec.beta >= 0.0, "stable_plus_drift requires beta >= 0");
            ModelSpec s;
            s.kind = ModelSpec::Kind::sum;
            ModelSpec st;
            st.kind = ModelSpec::Kind::stable;
            st.alpha = spec.alpha;
            s.components.push_back(st);
            if (spec.beta > 0.0) {
                ModelSpec dr;
                dr.kind = ModelSpec::Kind::rational;
                dr.rational_drift = spec.beta;
                s.components.push_back(dr);
            }
            auto built = build_sum(s);
            auto out = std::make_shared<LaplaceExponent>(*built);
            std::ostringstream nm;
            nm << "stable_plus_drift(alpha=" << spec.alpha
               << ",beta=" << spec.beta << ")";
            out->name = nm.str();
            out->rv_order_inf = spec.beta > 0.0 ? 1.0 : 0.5 * spec.alpha;
            m = out;
            break;
        }
        case ModelSpec::Kind::gamma:
            m = build_gamma();
            break;
        case ModelSpec::Kind::log_log:
            m = build_log_log();
            break;
        case ModelSpec::Kind::cp_exponential:
            m = build_cp_exponential();
            break;
        case ModelSpec::Kind::rational:
            m = build_rational(spec);
            break;
        case ModelSpec::Kind::sum:
            m = build_sum(spec);
            break;
        case ModelSpec::Kind::scaled:
            m = build_scaled(spec);
            break;
    }
    auto out = std::const_pointer_cast<LaplaceExponent>(m);
    out->spec = spec;
    return out;
}

namespace {

using nlohmann::json;

const char* kind_name(ModelSpec::Kind k) {
    switch (k) {
        case ModelSpec::Kind::stable: return "stable";
        case ModelSpec::Kind::relativistic: return "relativistic";
        case ModelSpec::Kind::stable_plus_drift: return "stable_plus_drift";
        case ModelSpec::Kind::gamma: return "gamma";
        case ModelSpec::Kind::log_log: return "log_log";
        case ModelSpec::Kind::cp_exponential: return "cp_exponential";
        case ModelSpec::Kind::rational: return "rational";
        case ModelSpec::Kind::sum: return "sum";
        case ModelSpec::Kind::scaled: return "scaled";
    }
    return "?";
}

json spec_to_json(const ModelSpec& s) {
    json j;
    j["kind"] = kind_name(s.kind);
    switch (s.kind) {
        case ModelSpec::Kind::stable:
            j["alpha"] = s.alpha;
            break;
        case ModelSpec::Kind::relativistic:
            j["m"] = s.m;
            break;
        case ModelSpec::Kind::stable_plus_drift:
            j["alpha"] = s.alpha;
            j["beta"] = s.beta;
            break;
        case ModelSpec::Kind::rational: {
            j["const"] = s.rational_const;
            j["drift"] = s.rational_drift;
            json terms = json::array();
            for (const auto& t : s.terms) terms.push_back({{"a", t.a}, {"b", t.b}});
            j["terms"] = terms;
            break;
        }
        case ModelSpec::Kind::sum: {
            json comps = json::array();
            for (const auto& c : s.components) comps.push_back(spec_to_json(c));
            j["components"] = comps;
            break;
        }
        case ModelSpec::Kind::scaled:
            j["factor"] = s.factor;
            j["inner"] = spec_to_json(s.components.at(0));
            break;
        default:
            break;
    }
    return j;
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "stable") {
        s.kind = ModelSpec::Kind::stable;
        s.alpha = j.at("alpha").get<double>();
    } else if (kind == "relativistic") {
        s.kind = ModelSpec::Kind::relativistic;
        s.m = j.at("m").get<double>();
    } else if (kind == "stable_plus_drift") {
        s.kind = ModelSpec::Kind::stable_plus_drift;
        s.alpha = j.at("alpha").get<double>();
        s.beta = j.at("beta").get<double>();
    } else if (kind == "gamma") {
        s.kind = ModelSpec::Kind::gamma;
    } else if (kind == "log_log") {
        s.kind = ModelSpec::Kind::log_log;
    } else if (kind == "cp_exponential") {
        s.kind = ModelSpec::Kind::cp_exponential;
    } else if (kind == "rational") {
        s.kind = ModelSpec::Kind::rational;
        s.rational_const = j.value("const", 0.0);
        s.rational_drift = j.value("drift", 0.0);
        if (j.contains("terms"))
            for (const auto& t : j.at("terms"))
                s.terms.push_back({t.at("a").get<double>(), t.at("b").get<double>()});
    } else if (kind == "sum") {
        s.kind = ModelSpec::Kind::sum;
        for (const auto& c : j.at("components")) s.components.push_back(spec_from_json(c));
    } else if (kind == "scaled") {
        s.kind = ModelSpec::Kind::scaled;
        s.factor = j.at("factor").get<double>();
        s.components.push_back(spec_from_json(j.at("inner")));
    } else {
        throw std::invalid_argument("unknown model kind: " + kind);
    }
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse number '" + s + "' in " + what);
    }
}

} // namespace

std::string ModelSpec::to_json() const { return spec_to_json(*this).dump(); }

ModelSpec ModelSpec::from_json(const std::string& text) {
    return spec_from_json(json::parse(text));
}

ModelSpec ModelSpec::parse(const std::string& text) {
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t\n\r"));
    t.erase(t.find_last_not_of(" \t\n\r") + 1);
    if (!t.empty() && t[0] == '{') return from_json(t);
    const auto parts = split(t, ':');
    const std::string& head = parts[0];
    ModelSpec s;
    if (head == "stable") {
        if (parts.size() != 2)
            throw std::invalid_argument("expected stable:ALPHA");
        s.kind = Kind::stable;
        s.alpha = parse_num(parts[1], "stable");
    } else if (head == "brownian") {
        s.kind = Kind::stable;
        s.alpha = 2.0;
    } else if (head == "relativistic" || head == "rel") {
        if (parts.size() != 2)
            throw std::invalid_argument("expected relativistic:M");
        s.kind = Kind::relativistic;
        s.m = parse_num(parts[1], "relativistic");
    } else if (head == "stable-drift" || head == "stable_plus_drift") {
        if (parts.size() != 3)
            throw std::invalid_argument("expected stable-drift:ALPHA:BETA");
        s.kind = Kind::stable_plus_drift;
        s.alpha = parse_num(parts[1], "stable-drift");
        s.beta = parse_num(parts[2], "stable-drift");
    } else if (head == "gamma") {
        s.kind = Kind::gamma;
    } else if (head == "log-log" || head == "log_log" || head == "loglog") {
        s.kind = Kind::log_log;
    } else if (head == "cp-exp" || head == "cp_exponential" || head == "cp") {
        s.kind = Kind::cp_exponential;
    } else if (head == "rational") {
        if (parts.size() != 2)
            throw std::invalid_argument("expected rational:A1/B1,A2/B2,...");
        s.kind = Kind::rational;
        for (const auto& term : split(parts[1], ',')) {
            const auto ab = split(term, '/');
            if (ab.size() != 2)
                throw std::invalid_argument("expected A/B in rational term '" + term + "'");
            s.terms.push_back({parse_num(ab[0], "rational"), parse_num(ab[1], "rational")});
        }
    } else {
        throw std::invalid_argument("unknown model '" + text + "'");
    }
    return s;
}

namespace {

struct MarginAccum {
    double worst = std::numeric_limits<double>::infinity();
    void add(double slack) { worst = std::min(worst, slack); }
};

} // namespace

std::vector<double> default_validation_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 60; ++i)
        g.push_back(std::pow(10.0, -3.0 + 6.0 * i / 60.0));
    return g;
}

std::vector<cplx> default_complex_samples() {
    std::vector<cplx> z;
    for (double r : {1e-2, 1.0, 1e2})
        for (double phi : {kPi / 6, kPi / 2, 5 * kPi / 6}) {
            z.emplace_back(r * std::cos(phi), r * std::sin(phi));
            z.emplace_back(r * std::cos(phi), -r * std::sin(phi));
        }
    return z;
}

ValidationReport validate_cbf(const LaplaceExponent& model,
                              std::span<const double> grid,
                              std::span<const cplx> complex_samples) {
    if (grid.empty()) throw std::invalid_argument("validate_cbf: empty grid");
    for (double x : grid)
        if (!(x > 0.0)) throw std::invalid_argument("validate_cbf: grid must be positive");
    for (cplx z : complex_samples)
        if (z.imag() == 0.0 && z.real() <= 0.0)
            throw std::invalid_argument("validate_cbf: complex samples must avoid (-inf, 0]");

    constexpr double kTol = 1e-10;
    ValidationReport rep;
    auto push = [&](const std::string& name, double worst, const std::string& detail = "") {
        rep.checks.push_back({name, worst, worst >= -kTol, detail});
    };

    MarginAccum mono, conc, ca, cb;
    MarginAccum d1c, d2c;
    for (double x : grid) {
        const double f = model.eval(x);
        const double f1 = model.deriv1(x);
        const double f2 = model.deriv2(x);
        const double fs = std::max(std::abs(f), 1e-300);
        const double f1s = std::max(std::abs(f1), 1e-300);
        mono.add(std::min(f / fs, f1 / f1s));
        conc.add(-f2 / std::max(std::abs(f2), 1e-300));
        // (a) 0 <= x f'(x) <= f(x)
        ca.add(std::min(x * f1 / fs, (f - x * f1) / fs));
        // (b) 0 <= -x f''(x) <= 2 f'(x)
        cb.add(std::min(-x * f2 / f1s, (2.0 * f1 + x * f2) / f1s));
        // derivative consistency against central differences
        {
            const double h = 1e-5 * x;
            const double fd1 = (model.eval(x + h) - model.eval(x - h)) / (2.0 * h);
            d1c.add(1e-6 - std::abs(fd1 - f1) / f1s);
            const double h2 = 2e-4 * x;
            const double fd2 =
                (model.eval(x + h2) - 2.0 * f + model.eval(x - h2)) / (h2 * h2);
            const double scale2 = std::max(std::abs(f2), f / (x * x));
            d2c.add(1e-6 - std::abs(fd2 - f2) / scale2);
        }
    }
    push("psi_nondecreasing", mono.worst);
    push("psi_concave", conc.worst);
    push("cbf_a_xfp_le_f", ca.worst);
    push("cbf_b_xfpp_le_2fp", cb.worst);
    push("deriv1_matches_fd", d1c.worst);
    push("deriv2_matches_fd", d2c.worst);

    MarginAccum cc, cd, up, sym, axis;
    double growth_sup = 0.0;
    bool growth_finite = true;
    for (cplx z : complex_samples) {
        const double eps = kPi - std::abs(std::arg(z));
        const double sine = std::sin(0.5 * eps);
        const double bound = model.eval(std::abs(z)) / sine;
        // the derivative bound needs sine^-2: |s z/(s+z)^2| <=
        // sin(eps/2)^-2 s z/(s+|z|)^2, since |s/(s+z)| can exceed 1 left of
        // the imaginary axis
        const double bound_d = bound / sine;
        const cplx fz = model.eval_complex(z);
        const cplx f1z = model.deriv1_complex(z);
        cc.add((bound - std::abs(fz)) / bound);
        cd.add((bound_d - std::abs(z * f1z)) / bound_d);
        if (!std::isfinite(std::abs(fz))) growth_finite = false;
        growth_sup = std::max(growth_sup, std::abs(fz) / (1.0 + std::abs(z)));
        if (z.imag() > 0.0) up.add(fz.imag() / std::abs(fz));
        const cplx fzc = model.eval_complex(std::conj(z));
        sym.add(kTol - std::abs(fzc - std::conj(fz)) / std::abs(fz));
    }
    for (double x : grid) {
        const cplx fz = model.eval_complex(cplx{x, 0.0});
        const double f = model.eval(x);
        axis.add(1e-14 - std::abs(fz - f) / std::max(std::abs(f), 1e-300));
    }
    push("cbf_c_modulus_bound", cc.worst);
    push("cbf_d_deriv_modulus_bound", cd.worst);
    {
        std::ostringstream os;
        os << "sup |psi(z)|/(1+|z|) = " << growth_sup;
        rep.checks.push_back({"cbf_e_linear_growth", growth_finite ? 0.0 : -1.0,
                              growth_finite, os.str()});
    }
    push("upper_half_plane_invariant", up.worst);
    push("conjugate_symmetry", sym.worst);
    push("complex_matches_real_axis", axis.worst);

    if (model.has_boundary()) {
        MarginAccum bnd, bnd_im;
        for (double x : grid) {
            const cplx b = model.boundary_upper(x);
            if (!std::isfinite(std::abs(b))) continue; // pole on the cut
            const double e1 = 1e-6 * x, e2 = 5e-7 * x;
            const cplx v1 = model.eval_complex(cplx{-x, e1});
            const cplx v2 = model.eval_complex(cplx{-x, e2});
            const cplx extrap = 2.0 * v2 - v1; // one Richardson step in eps
            const double scale = std::max({std::abs(b), std::abs(extrap), 1e-12});
            // near a branch point the limit converges slower than O(eps);
            // widen the tolerance by the observed Richardson step size
            const double slack = 1e-5 + 10.0 * std::abs(v2 - v1) / scale;
            bnd.add(slack - std::abs(extrap - b) / scale);
            bnd_im.add(b.imag() / std::max(std::abs(b), 1e-300));
        }
        push("boundary_matches_upper_limit", bnd.worst);
        push("boundary_imag_nonnegative", bnd_im.worst);
    }
    return rep;
}

} // namespace halfline
