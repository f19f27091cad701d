#include "montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>
#include <vector>

namespace halfline {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
    return splitmix64(splitmix64(seed) ^ (replica * 0xD1B54A32D192ED03ULL + 1));
}

double RandomStream::u01() {
    for (;;) {
        const double u = (eng_() >> 11) * 0x1.0p-53;
        if (u > 0.0 && u < 1.0) return u;
    }
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01()));
    const double phi = 2.0 * kPi * u01();
    spare_normal_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

double RandomStream::exponential() { return -std::log(u01()); }

double RandomStream::gamma(double shape) {
    // Marsaglia-Tsang, with the usual shape < 1 boost
    if (shape < 1.0) {
        const double u = u01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = u01();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

long long RandomStream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 60.0) {
        const double limit = std::exp(-mean);
        long long k = 0;
        double prod = u01();
        while (prod > limit) {
            ++k;
            prod *= u01();
        }
        return k;
    }
    // split large means; increments here have tiny dt so this path is rare
    const long long half = poisson(0.5 * mean);
    return half + poisson(mean - 0.5 * mean);
}

double RandomStream::stable_standard(double beta) {
    // Kanter's representation: S = (A(pi U)/W)^{(1-beta)/beta},
    // A(u) = [sin(beta u)/sin u]^{beta/(1-beta)} sin((1-beta) u)/sin u.
    const double u = kPi * u01();
    const double w = exponential();
    const double lsu = std::log(std::sin(u));
    const double log_a = (beta / (1.0 - beta)) * (std::log(std::sin(beta * u)) - lsu) +
                         std::log(std::sin((1.0 - beta) * u)) - lsu;
    return std::exp(((1.0 - beta) / beta) * (log_a - std::log(w)));
}

struct SubordinatorSampler::Node {
    enum class Kind { drift, stable, gamma_k, relativistic, cp_mixture, sum } kind;
    double beta = 0.0;      // stable index in (0,1)
    double drift = 0.0;     // deterministic part per unit time
    double mass = 0.0;      // relativistic m
    double time_scale = 1.0;// scaled models stretch subordinator time
    std::vector<RationalTerm> jumps; // cp_mixture: rate a_i, jump Exp(b_i)
    double total_rate = 0.0;
    std::vector<std::shared_ptr<const Node>> parts;
};

namespace {

std::shared_ptr<const SubordinatorSampler::Node> make_node(const ModelSpec& spec,
                                                           double time_scale) {
    using Node = SubordinatorSampler::Node;
    auto n = std::make_shared<Node>();
    n->time_scale = time_scale;
    switch (spec.kind) {
        case ModelSpec::Kind::stable:
            if (spec.alpha == 2.0) {
                n->kind = Node::Kind::drift;
                n->drift = 1.0;
            } else {
                n->kind = Node::Kind::stable;
                n->beta = 0.5 * spec.alpha;
                if (!(n->beta > 0.0 && n->beta < 0.995))
                    throw UnsupportedError(
                        "sampler: stable index too close to 1 for Kanter sampling");
            }
            break;
        case ModelSpec::Kind::gamma:
            n->kind = Node::Kind::gamma_k;
            break;
        case ModelSpec::Kind::relativistic:
            n->kind = Node::Kind::relativistic;
            n->mass = spec.m;
            break;
        case ModelSpec::Kind::cp_exponential:
            n->kind = Node::Kind::cp_mixture;
            n->jumps = {{1.0, 1.0}};
            n->total_rate = 1.0;
            break;
        case ModelSpec::Kind::rational: {
            if (spec.rational_const > 0.0)
                throw UnsupportedError(
                    "sampler: rational model with killing (const > 0) has no subordinator");
            n->kind = Node::Kind::cp_mixture;
            n->drift = spec.rational_drift;
            n->jumps = spec.terms;
            n->total_rate = 0.0;
            for (const auto& t : spec.terms) n->total_rate += t.a;
            break;
        }
        case ModelSpec::Kind::stable_plus_drift: {
            n->kind = Node::Kind::sum;
            ModelSpec st;
            st.kind = ModelSpec::Kind::stable;
            st.alpha = spec.alpha;
            n->parts.push_back(make_node(st, time_scale));
            auto d = std::make_shared<Node>();
            d->kind = Node::Kind::drift;
            d->drift = spec.beta;
            d->time_scale = time_scale;
            n->parts.push_back(std::move(d));
            break;
        }
        case ModelSpec::Kind::sum: {
            n->kind = Node::Kind::sum;
            for (const auto& c : spec.components)
                n->parts.push_back(make_node(c, time_scale));
            break;
        }
        case ModelSpec::Kind::scaled:
            // psi = C psi_inner: Z_t =d Z^inner_{C t}
            return make_node(spec.components.at(0), time_scale * spec.factor);
        default:
            throw UnsupportedError("sampler: no subordinator sampler for this model kind");
    }
    return n;
}

double sample_node(const SubordinatorSampler::Node& n, double dt,
                   RandomStream& rng, std::atomic<long long>& retries) {
    using Node = SubordinatorSampler::Node;
    const double T = dt * n.time_scale;
    switch (n.kind) {
        case Node::Kind::drift:
            return n.drift * T;
        case Node::Kind::stable:
            // E e^{-xi Z} = e^{-T xi^beta}: Z = T^{1/beta} S
            return std::pow(T, 1.0 / n.beta) * rng.stable_standard(n.beta);
        case Node::Kind::gamma_k:
            return rng.gamma(T);
        case Node::Kind::relativistic: {
            // exponential tilt of the 1/2-stable subordinator: propose from
            // Z0 = T^2 S_{1/2}, accept with e^{-m^2 Z0}; acceptance rate
            // e^{-m T}, bounded retries for m dt <= 1
            for (;;) {
                const double z = T * T * rng.stable_standard(0.5);
                if (std::log(rng.u01()) <= -n.mass * n.mass * z) return z;
                ++retries;
            }
        }
        case Node::Kind::cp_mixture: {
            double z = n.drift * T;
            const long long jumps = rng.poisson(n.total_rate * T);
            for (long long j = 0; j < jumps; ++j) {
                double pick = rng.u01() * n.total_rate;
                double b = n.jumps.back().b;
                for (const auto& term : n.jumps) {
                    if (pick < term.a) {
                        b = term.b;
                        break;
                    }
                    pick -= term.a;
                }
                z += rng.exponential() / b;
            }
            return z;
        }
        case Node::Kind::sum: {
            double z = 0.0;
            for (const auto& p : n.parts) z += sample_node(*p, dt, rng, retries);
            return z;
        }
    }
    return 0.0;
}

} // namespace

SubordinatorSampler SubordinatorSampler::for_model(const ModelSpec& spec) {
    SubordinatorSampler s;
    s.root_ = make_node(spec, 1.0);
    return s;
}

double SubordinatorSampler::sample_increment(double dt, RandomStream& rng) const {
    if (!(dt > 0.0))
        throw std::invalid_argument("sample_increment: dt must be > 0");
    return sample_node(*root_, dt, rng, *retries_);
}

KilledPathResult simulate_killed(const SubordinatorSampler& sampler, double x,
                                 double t, double dt, RandomStream& rng) {
    if (!(x > 0.0) || !(dt > 0.0) || !(dt <= t))
        throw std::invalid_argument("simulate_killed: need x > 0, 0 < dt <= t");
    const long long steps = static_cast<long long>(std::ceil(t / dt - 1e-12));
    KilledPathResult out;
    out.steps = steps;
    double pos = x;
    for (long long k = 0; k < steps; ++k) {
        const double s = sampler.sample_increment(dt, rng);
        pos += std::sqrt(2.0 * s) * rng.normal();
        if (pos <= 0.0) {
            out.alive = false;
            out.position = pos;
            return out;
        }
    }
    out.alive = true;
    out.position = pos;
    return out;
}

namespace {

constexpr long long kChunk = 4096;

template <typename PerReplica>
void run_replicas(long long n, int threads, PerReplica&& body) {
    const long long chunks = (n + kChunk - 1) / kChunk;
    if (threads <= 1) {
        for (long long c = 0; c < chunks; ++c)
            for (long long i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
                body(c, i);
        return;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min<long long>(threads, chunks);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const long long c = next.fetch_add(1);
                if (c >= chunks) return;
                for (long long i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
                    body(c, i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

McEstimate mc_survival(const ModelSpec& spec, double x, double t, long long n,
                       double dt, std::uint64_t seed, int threads) {
    if (n < 1000) throw std::invalid_argument("mc_survival: n must be >= 1000");
    const auto sampler = SubordinatorSampler::for_model(spec);
    const long long chunks = (n + kChunk - 1) / kChunk;
    std::vector<long long> alive(chunks, 0);
    run_replicas(n, threads, [&](long long c, long long i) {
        RandomStream rng(replica_seed(seed, static_cast<std::uint64_t>(i)));
        const auto r = simulate_killed(sampler, x, t, dt, rng);
        if (r.alive) ++alive[c];
    });
    long long total = 0;
    for (long long c = 0; c < chunks; ++c) total += alive[c];
    const double p = static_cast<double>(total) / n;
    McEstimate e;
    e.value = p;
    e.stderr_ = std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
    e.n = n;
    e.dt = dt;
    e.seed = seed;
    return e;
}

McEstimate mc_eigen_check(const ModelSpec& spec, const Eigenfunction& ef,
                          double x, double t, long long n, double dt,
                          std::uint64_t seed, int threads) {
    if (n < 1000) throw std::invalid_argument("mc_eigen_check: n must be >= 1000");
    const auto sampler = SubordinatorSampler::for_model(spec);
    const long long chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sum(chunks, 0.0), sumsq(chunks, 0.0);
    run_replicas(n, threads, [&](long long c, long long i) {
        RandomStream rng(replica_seed(seed, static_cast<std::uint64_t>(i)));
        const auto r = simulate_killed(sampler, x, t, dt, rng);
        const double v = r.alive ? ef.F(r.position) : 0.0;
        sum[c] += v;
        sumsq[c] += v * v;
    });
    double s = 0.0, s2 = 0.0;
    for (long long c = 0; c < chunks; ++c) {
        s += sum[c];
        s2 += sumsq[c];
    }
    const double mean = s / n;
    const double var = std::max(s2 / n - mean * mean, 0.0);
    McEstimate e;
    e.value = mean;
    e.stderr_ = std::sqrt(var / n);
    e.n = n;
    e.dt = dt;
    e.seed = seed;
    return e;
}

void mc_dump(const ModelSpec& spec, double x, double t, long long n,
             double dt, std::uint64_t seed, const std::string& path) {
    const auto sampler = SubordinatorSampler::for_model(spec);
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("mc_dump: cannot open " + path);
    for (long long i = 0; i < n; ++i) {
        RandomStream rng(replica_seed(seed, static_cast<std::uint64_t>(i)));
        const auto r = simulate_killed(sampler, x, t, dt, rng);
        double triple[3] = {r.position, r.alive ? 1.0 : 0.0,
                            static_cast<double>(r.steps)};
        // little-endian f64 triples
        for (double v : triple) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            unsigned char buf[8];
            for (int b = 0; b < 8; ++b)
                buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
            if (std::fwrite(buf, 1, 8, fp) != 8) {
                std::fclose(fp);
                throw std::runtime_error("mc_dump: short write to " + path);
            }
        }
    }
    std::fclose(fp);
}

} // namespace halfline
