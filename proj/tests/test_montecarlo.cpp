#include <cmath>
#include <cstdio>
#include <cstring>

#include "doctest.h"
#include "core/montecarlo.hpp"
#include "core/spectral.hpp"

using namespace halfline;

namespace {

ModelSpec spec_of(const std::string& text) { return ModelSpec::parse(text); }

// empirical Laplace transform of increments vs e^{-dt psi(xi)}
void check_sampler_laplace(const std::string& text, double dt, long long n) {
    const auto spec = spec_of(text);
    auto model = build_model(spec);
    const auto sampler = SubordinatorSampler::for_model(spec);
    for (double xi : {0.5, 1.0, 2.0}) {
        RandomStream rng(replica_seed(20240803, 17));
        double s = 0.0, s2 = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double v = std::exp(-xi * sampler.sample_increment(dt, rng));
            s += v;
            s2 += v * v;
        }
        const double mean = s / n;
        const double sd = std::sqrt(std::max(s2 / n - mean * mean, 0.0) / n);
        const double target = std::exp(-dt * model->eval(xi));
        INFO(text, " xi=", xi, " mean=", mean, " target=", target, " sd=", sd);
        CHECK(std::abs(mean - target) <= 3.0 * sd + 1e-12);
    }
}

} // namespace

TEST_CASE("sampler Laplace transforms match e^{-dt psi} for the catalog") {
    check_sampler_laplace("stable:1.2", 0.3, 200000);
    check_sampler_laplace("stable:0.7", 0.3, 200000);
    check_sampler_laplace("gamma", 0.5, 200000);
    check_sampler_laplace("relativistic:1", 0.3, 200000);
    check_sampler_laplace("cp-exp", 0.5, 200000);
    check_sampler_laplace("stable-drift:1:0.5", 0.3, 200000);
    check_sampler_laplace("rational:5/1,1/5", 0.2, 200000);
    check_sampler_laplace("brownian", 0.4, 10000);
}

TEST_CASE("unsupported samplers are refused") {
    CHECK_THROWS_AS(SubordinatorSampler::for_model(spec_of("log-log")),
                    UnsupportedError);
    ModelSpec killed = spec_of("rational:1/1");
    killed.rational_const = 0.5;
    CHECK_THROWS_AS(SubordinatorSampler::for_model(killed), UnsupportedError);
}

TEST_CASE("gamma increments have mean dt") {
    const auto sampler = SubordinatorSampler::for_model(spec_of("gamma"));
    RandomStream rng(7);
    const long long n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double v = sampler.sample_increment(1.0, rng);
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double sd = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 3.0 * sd);
}

TEST_CASE("1/2-stable subordinator tail: P(Z_1 > z) = erf(1/(2 sqrt z))") {
    // exact for this index: Z = 1/(2 N^2)
    const auto sampler = SubordinatorSampler::for_model(spec_of("stable:1"));
    RandomStream rng(11);
    const long long n = 1000000;
    long long over1e4 = 0, over100 = 0;
    for (long long i = 0; i < n; ++i) {
        const double v = sampler.sample_increment(1.0, rng);
        if (v > 1e4) ++over1e4;
        if (v > 100.0) ++over100;
    }
    auto check_tail = [&](long long count, double z) {
        const double p = static_cast<double>(count) / n;
        const double exact = std::erf(1.0 / (2.0 * std::sqrt(z)));
        const double sd = std::sqrt(exact * (1 - exact) / n);
        INFO("z=", z, " p=", p, " exact=", exact);
        CHECK(std::abs(p - exact) <= 3.0 * sd);
        // asymptotic z^{-1/2}/Gamma(1/2) form
        const double asym = std::pow(z, -0.5) / std::sqrt(M_PI) * 2.0 / 2.0;
        CHECK(std::abs(p - asym) <= 3.0 * sd + 0.02 * asym);
    };
    check_tail(over1e4, 1e4);
    check_tail(over100, 100.0);
}

TEST_CASE("compound Poisson increment is zero when no jumps occur") {
    const auto sampler = SubordinatorSampler::for_model(spec_of("cp-exp"));
    RandomStream rng(3);
    int zeros = 0;
    const int n = 20000;
    const double dt = 0.05;
    for (int i = 0; i < n; ++i)
        if (sampler.sample_increment(dt, rng) == 0.0) ++zeros;
    // P(N = 0) = e^{-dt}
    const double p = static_cast<double>(zeros) / n;
    const double target = std::exp(-dt);
    CHECK(std::abs(p - target) < 3.0 * std::sqrt(target * (1 - target) / n));
}

TEST_CASE("relativistic rejection stays cheap for m dt <= 1") {
    const auto sampler = SubordinatorSampler::for_model(spec_of("relativistic:1"));
    RandomStream rng(5);
    const long long n = 100000;
    for (long long i = 0; i < n; ++i) sampler.sample_increment(1e-3, rng);
    CHECK(sampler.rejection_retries() < n / 100);
}

TEST_CASE("single-step Brownian survival matches the one-step closed form") {
    // dt = t: survival = Phi(x / sqrt(2 t)), upper-biased vs erf(x/(2 sqrt t))
    const double x = 1.0, t = 1.0;
    auto est = mc_survival(spec_of("brownian"), x, t, 200000, t, 99, 4);
    const double phi = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0 * t) / std::sqrt(2.0)));
    CHECK(std::abs(est.value - phi) <= 3.0 * est.stderr_);
    CHECK(est.value > std::erf(x / (2.0 * std::sqrt(t))));
}

TEST_CASE("far-from-boundary path is almost surely alive") {
    auto est = mc_survival(spec_of("stable:1.2"), 1e6, 1.0, 2000, 0.05, 4, 2);
    CHECK(est.value > 0.999);
}

TEST_CASE("seed determinism: identical seeds give identical estimates") {
    const auto spec = spec_of("stable:1.2");
    auto a = mc_survival(spec, 1.0, 0.5, 5000, 0.01, 12345, 1);
    auto b = mc_survival(spec, 1.0, 0.5, 5000, 0.01, 12345, 4);
    CHECK(a.value == b.value); // bit-identical across thread counts
    auto c = mc_survival(spec, 1.0, 0.5, 5000, 0.01, 54321, 4);
    CHECK(a.value != c.value);
}

TEST_CASE("discretization bias decreases toward the exact value (Brownian)") {
    const double x = 1.0, t = 1.0;
    const double exact = std::erf(0.5);
    const auto spec = spec_of("brownian");
    double prev = 1.0;
    double prev_se = 0.0;
    for (double dt : {1e-1, 1e-2, 1e-3}) {
        auto est = mc_survival(spec, x, t, 100000, dt, 7, 4);
        CHECK(est.value >= exact - 3.0 * est.stderr_); // biased upward
        CHECK(est.value <= prev + prev_se + est.stderr_); // ordering up to 1 stderr
        prev = est.value;
        prev_se = est.stderr_;
    }
}

TEST_CASE("mc_survival brackets the spectral value (stable 1.2)") {
    const auto spec = spec_of("stable:1.2");
    auto est = mc_survival(spec, 1.0, 0.5, 100000, 1e-3, 2024, 4);
    auto model = build_model(spec);
    QuadratureOptions o;
    o.tol_abs = 1e-6;
    o.tol_rel = 1e-5;
    const double sp = survival(model, 0.5, 1.0, o, 4);
    INFO("mc=", est.value, " +- ", est.stderr_, " spectral=", sp);
    CHECK(std::abs(est.value - sp) <= 3.0 * est.stderr_);
}

TEST_CASE("mc_eigen_check: Brownian semigroup identity") {
    const auto spec = spec_of("brownian");
    auto model = build_model(spec);
    Eigenfunction ef(model, 1.0);
    auto est = mc_eigen_check(spec, ef, 1.0, 0.5, 100000, 1e-2, 31, 4);
    const double target = std::exp(-0.5) * std::sin(1.0);
    INFO("mc=", est.value, " +- ", est.stderr_, " target=", target);
    CHECK(std::abs(est.value - target) <= 3.0 * est.stderr_);
}

TEST_CASE("mc_eigen_check at tiny t returns F itself") {
    const auto spec = spec_of("stable:1.5");
    auto model = build_model(spec);
    Eigenfunction ef(model, 1.0);
    const double t = 1e-4;
    auto est = mc_eigen_check(spec, ef, 1.0, t, 50000, t, 17, 4);
    const double target = std::exp(-t * model->eval(1.0)) * ef.F(1.0);
    CHECK(std::abs(est.value - target) <= 3.0 * est.stderr_ + 5e-3);
}

TEST_CASE("mc_dump writes little-endian f64 triples") {
    const char* path = "mc_dump_test.bin";
    const auto spec = spec_of("brownian");
    mc_dump(spec, 1.0, 0.1, 64, 0.05, 5, path);
    std::FILE* fp = std::fopen(path, "rb");
    REQUIRE(fp != nullptr);
    std::fseek(fp, 0, SEEK_END);
    const long size = std::ftell(fp);
    CHECK(size == 64 * 3 * 8);
    std::fseek(fp, 0, SEEK_SET);
    int alive = 0;
    for (int i = 0; i < 64; ++i) {
        unsigned char buf[24];
        REQUIRE(std::fread(buf, 1, 24, fp) == 24);
        double triple[3];
        for (int k = 0; k < 3; ++k) {
            std::uint64_t bits = 0;
            for (int b = 7; b >= 0; --b) bits = (bits << 8) | buf[8 * k + b];
            std::memcpy(&triple[k], &bits, 8);
        }
        CHECK((triple[1] == 0.0 || triple[1] == 1.0));
        CHECK(triple[2] == 2.0); // ceil(0.1/0.05) steps
        if (triple[1] == 1.0) {
            CHECK(triple[0] > 0.0);
            ++alive;
        } else {
            CHECK(triple[0] <= 0.0);
        }
    }
    std::fclose(fp);
    std::remove(path);
    CHECK(alive > 32); // far more survive than die at x=1, t=0.1
}

TEST_CASE("simulate_killed validates its arguments") {
    const auto sampler = SubordinatorSampler::for_model(spec_of("brownian"));
    RandomStream rng(1);
    CHECK_THROWS_AS(simulate_killed(sampler, -1.0, 1.0, 0.1, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_killed(sampler, 1.0, 1.0, 2.0, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_survival(spec_of("brownian"), 1.0, 1.0, 10, 0.1, 1),
                    std::invalid_argument);
}
