#include <cmath>

#include "doctest.h"
#include "core/models.hpp"

using namespace halfline;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModelPtr parse_build(const std::string& s) {
    return build_model(ModelSpec::parse(s));
}
}

TEST_CASE("catalog closed forms") {
    auto stable1 = parse_build("stable:1");
    CHECK(stable1->eval(4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(stable1->deriv1(4.0) == doctest::Approx(0.25).epsilon(1e-15));

    auto rel = parse_build("relativistic:1");
    CHECK(rel->eval(3.0) == doctest::Approx(1.0).epsilon(1e-15));

    auto cp = parse_build("cp-exp");
    CHECK(cp->eval(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(!cp->is_unbounded);

    auto g = parse_build("gamma");
    CHECK(g->eval(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    auto br = parse_build("brownian");
    CHECK(br->eval(7.5) == doctest::Approx(7.5).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(parse_build("stable:2.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_build("stable:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_build("relativistic:-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_build("rational:-5/1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_build("nonsense"), std::invalid_argument);
}

TEST_CASE("model JSON round-trip is lossless") {
    for (const char* text :
         {"stable:1.2345678901234567", "relativistic:0.75",
          "stable-drift:1:0.5", "gamma", "log-log", "cp-exp",
          "rational:5/1,1/5"}) {
        const ModelSpec a = ModelSpec::parse(text);
        const ModelSpec b = ModelSpec::from_json(a.to_json());
        CHECK(a.to_json() == b.to_json());
    }
    // nested spec through JSON directly
    const std::string nested =
        R"({"kind":"scaled","factor":4.0,"inner":{"kind":"sum","components":)"
        R"([{"kind":"stable","alpha":1.5},{"kind":"gamma"}]}})";
    const ModelSpec s = ModelSpec::from_json(nested);
    CHECK(ModelSpec::from_json(s.to_json()).to_json() == s.to_json());
    auto m = build_model(s);
    CHECK(m->eval(2.0) ==
          doctest::Approx(4.0 * (std::pow(2.0, 0.75) + std::log1p(2.0)))
              .epsilon(1e-14));
}

TEST_CASE("scaling hook: scaled(C^2, inner) is exactly C^2 psi") {
    auto inner = parse_build("relativistic:1");
    ModelSpec s;
    s.kind = ModelSpec::Kind::scaled;
    s.factor = 9.0;
    s.components.push_back(ModelSpec::parse("relativistic:1"));
    auto scaled = build_model(s);
    for (double x : {0.1, 1.0, 42.0})
        CHECK(scaled->eval(x) == 9.0 * inner->eval(x));
}

TEST_CASE("boundary values of the catalog") {
    auto stable = parse_build("stable:1.5");
    const cplx b = stable->boundary_upper(4.0);
    const double r = std::pow(4.0, 0.75);
    CHECK(b.real() == doctest::Approx(r * std::cos(0.75 * kPi)).epsilon(1e-14));
    CHECK(b.imag() == doctest::Approx(r * std::sin(0.75 * kPi)).epsilon(1e-14));

    auto g = parse_build("gamma");
    CHECK(g->boundary_upper(0.5).imag() == 0.0);
    CHECK(g->boundary_upper(3.0).real() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(g->boundary_upper(3.0).imag() == doctest::Approx(kPi).epsilon(1e-14));

    auto rel = parse_build("relativistic:2");
    CHECK(rel->boundary_upper(1.0).imag() == 0.0);
    CHECK(rel->boundary_upper(8.0).imag() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rel->boundary_upper(8.0).real() == doctest::Approx(-2.0).epsilon(1e-14));

    // atom example: psi(1) = 8/3 equals psi^+(-4)
    auto rat = parse_build("rational:5/1,1/5");
    CHECK(rat->eval(1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(rat->boundary_upper(4.0).real() ==
          doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(rat->boundary_upper(4.0).imag() == 0.0);
}

TEST_CASE("validate_cbf passes on exact catalog models") {
    const auto grid = default_validation_grid();
    const auto zs = default_complex_samples();
    for (const char* text : {"stable:1.5", "stable:0.5", "brownian",
                             "relativistic:1", "gamma", "log-log", "cp-exp",
                             "stable-drift:1:0.5"}) {
        auto rep = validate_cbf(*parse_build(text), grid, zs);
        for (const auto& c : rep.checks) {
            INFO(text, ": ", c.name, " margin ", c.worst_margin);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("gamma model: xi psi'/psi tends to zero at infinity") {
    auto g = parse_build("gamma");
    auto r = [&](double x) { return x * g->deriv1(x) / g->eval(x); };
    CHECK(r(1e6) < r(1e2));
    CHECK(r(1e6) < 0.1);
    CHECK(r(1e12) < r(1e6));
}

TEST_CASE("corrupted model fails check (b)") {
    auto base = parse_build("stable:1.5");
    LaplaceExponent bad = *base;
    bad.deriv2 = [base](double x) { return -base->deriv2(x); }; // sign flip
    const auto grid = default_validation_grid();
    const auto zs = default_complex_samples();
    auto rep = validate_cbf(bad, grid, zs);
    bool b_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "cbf_b_xfpp_le_2fp") b_failed = !c.pass;
    CHECK(b_failed);
    CHECK(!rep.all_pass());
}

TEST_CASE("validate_cbf rejects bad grids") {
    auto m = parse_build("gamma");
    std::vector<double> empty;
    std::vector<cplx> zs;
    CHECK_THROWS_AS(validate_cbf(*m, empty, zs), std::invalid_argument);
    std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(validate_cbf(*m, neg, zs), std::invalid_argument);
}

TEST_CASE("complex evaluation matches real axis to 1e-14") {
    for (const char* text : {"stable:1.3", "relativistic:1", "gamma", "log-log"}) {
        auto m = parse_build(text);
        for (double x : {1e-3, 0.7, 42.0, 1e5}) {
            const cplx v = m->eval_complex(cplx{x, 0.0});
            CHECK(std::abs(v - m->eval(x)) <= 1e-14 * std::abs(m->eval(x)));
        }
    }
}

TEST_CASE("psi0 is surfaced, killing not interpreted") {
    ModelSpec s = ModelSpec::parse("rational:1/1");
    s.rational_const = 0.25;
    auto m = build_model(s);
    CHECK(m->psi0 == doctest::Approx(0.25));
}
