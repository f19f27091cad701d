#include <cmath>
#include <limits>

#include "doctest.h"
#include "core/quadrature.hpp"

using namespace halfline;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("tanh-sinh on the phase-shift log integral") {
    // (1/pi) int_0^1 (-log z)/(1-z^2) dz = pi/8, by series expansion and
    // integration by parts (the value is 3/4 * zeta(2) / pi)
    auto r = integrate_de(
        [](double z) { return -std::log(z) / (1.0 - z * z); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value / kPi == doctest::Approx(kPi / 8).epsilon(1e-12));
    CHECK(r.value / kPi == doctest::Approx(0.39269908169872415).epsilon(1e-12));
}

TEST_CASE("tanh-sinh integrates a constant") {
    auto r = integrate_de([](double) { return 1.0; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("half-line Poisson kernel integral") {
    // int_0^inf xi/(xi^2+zeta^2) dzeta = pi/2 for any xi > 0
    const double xi = 3.0;
    auto r = integrate_de(
        [xi](double z) { return xi / (xi * xi + z * z); }, 0.0, kInf);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(kPi / 2).epsilon(1e-10));
}

TEST_CASE("endpoint singularity x^{-1/2}") {
    auto r = integrate_de([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("NaN at an interior node is a hard error naming the abscissa") {
    CHECK_THROWS_AS(
        integrate_de([](double x) { return x < 0.5 ? 1.0 : std::nan(""); },
                     0.0, 1.0),
        QuadratureError);
}

TEST_CASE("linearity of integrate_de") {
    const double a = 2.5, b = -1.25;
    auto f = [](double x) { return std::exp(-x); };
    auto g = [](double x) { return std::sin(3.0 * x); };
    QuadratureOptions opt;
    auto rf = integrate_de(f, 0.0, 2.0, opt);
    auto rg = integrate_de(g, 0.0, 2.0, opt);
    auto rc = integrate_de([&](double x) { return a * f(x) + b * g(x); }, 0.0,
                           2.0, opt);
    const double tol = 2.0 * (opt.tol_abs + opt.tol_rel * std::abs(rc.value));
    CHECK(std::abs(rc.value - (a * rf.value + b * rg.value)) <= tol);
}

TEST_CASE("halving tol never increases the reported error on the log integral") {
    auto f = [](double z) { return -std::log(z) / (1.0 - z * z); };
    QuadratureOptions o1;
    o1.tol_abs = 1e-6;
    o1.tol_rel = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 6; ++k) {
        auto r = integrate_de(f, 0.0, 1.0, o1);
        CHECK(r.abs_error_estimate <= prev + 1e-18);
        prev = r.abs_error_estimate;
        o1.tol_abs *= 0.5;
    }
}

TEST_CASE("oscillatory integrator: Gaussian-damped sine") {
    // oracle: very fine trapezoid on [0, 40] at 1e6 nodes
    auto f = [](double l) { return std::exp(-l * l) * std::sin(l); };
    double oracle = 0.0;
    {
        const int n = 1000000;
        const double h = 40.0 / n;
        oracle = 0.5 * (f(0.0) + f(40.0));
        for (int i = 1; i < n; ++i) oracle += f(i * h);
        oracle *= h;
    }
    CHECK(oracle == doctest::Approx(0.42443638350202230).epsilon(1e-10));
    OscillatorySpec spec;
    spec.envelope = [](double l) { return std::exp(-l * l); };
    spec.frequency_hint = 1.0;
    QuadratureOptions opt;
    auto r = integrate_oscillatory(f, spec, opt);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(spec.truncation_tail_bound >= 0.0);
}

TEST_CASE("oscillatory integrator matches plain exponential") {
    auto f = [](double l) { return std::exp(-l); };
    OscillatorySpec spec;
    spec.envelope = [](double l) { return std::exp(-l); };
    spec.frequency_hint = 1.0;
    QuadratureOptions opt;
    auto r = integrate_oscillatory(f, spec, opt);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 1.0) <= 10.0 * (opt.tol_abs + opt.tol_rel));
    auto rde = integrate_de(f, 0.0, kInf, opt);
    CHECK(std::abs(r.value - rde.value) <= 10.0 * (opt.tol_abs + opt.tol_rel));
}

TEST_CASE("oscillatory integrator: product of sines under Gaussian envelope") {
    // t=1, x=y=1: closed Gaussian value (sqrt(pi)/4)(1 - e^{-1})
    auto f = [](double l) {
        return std::exp(-l * l) * std::sin(l) * std::sin(l);
    };
    const double closed = std::sqrt(kPi) / 4.0 * (1.0 - std::exp(-1.0));
    CHECK(closed == doctest::Approx(0.28010112968305596).epsilon(1e-13));
    OscillatorySpec spec;
    spec.envelope = [](double l) { return std::exp(-l * l); };
    spec.frequency_hint = 2.0;
    auto r = integrate_oscillatory(f, spec);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("non-decaying envelope flagged as non-convergent") {
    auto f = [](double) { return 1.0; };
    OscillatorySpec spec;
    spec.envelope = [](double) { return 1.0; };
    spec.frequency_hint = 1.0;
    auto r = integrate_oscillatory(f, spec);
    CHECK(!r.converged);
}

TEST_CASE("laplace_of_sampled: constant and sine") {
    const int n = 20001;
    std::vector<double> xs(n), ones(n), sines(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = 30.0 * i / (n - 1);
        ones[i] = 1.0;
        sines[i] = std::sin(xs[i]);
    }
    CHECK(laplace_of_sampled(xs, ones, 2.0) ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(laplace_of_sampled(xs, sines, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("laplace_of_sampled rejects a short grid and names the required X") {
    std::vector<double> xs{0.0, 0.5, 1.0}, fs{1.0, 1.0, 1.0};
    CHECK_THROWS_WITH_AS(laplace_of_sampled(xs, fs, 0.5, 1e-8),
                         doctest::Contains("need X >="),
                         std::invalid_argument);
}

TEST_CASE("gauss tables integrate polynomials exactly") {
    const auto& x15 = gauss_nodes(15);
    const auto& w15 = gauss_weights(15);
    // degree-28 monomial on (-1,1)
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += w15[i] * std::pow(x15[i], 28);
    CHECK(s == doctest::Approx(2.0 / 29.0).epsilon(1e-12));
    const auto& w21 = gauss_weights(21);
    double total = 0.0;
    for (double w : w21) total += w;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("pairwise_sum matches plain summation") {
    std::vector<double> v(1001);
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i);
    double plain = 0.0;
    for (double x : v) plain += x;
    CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
}
