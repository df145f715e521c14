#include <doctest.h>

#include <cmath>
#include <random>

#include "fklattice/hyperdual.hpp"

using fklattice::HyperDual;

TEST_CASE("seeded elementary functions carry first and second derivatives") {
    const HyperDual s = HyperDual::variable(0.0);

    const HyperDual sine = sin(s);
    CHECK(sine.v == 0.0);
    CHECK(sine.d1 == 1.0);
    CHECK(sine.d12 == 0.0);

    const HyperDual ex = exp(s);
    CHECK(ex.v == 1.0);
    CHECK(ex.d1 == 1.0);
    CHECK(ex.d12 == 1.0);
}

TEST_CASE("cube at 2 differentiates exactly") {
    // d/dx x^3 = 3x^2 = 12 and d2/dx2 = 6x = 12 at x = 2.
    const HyperDual s = HyperDual::variable(2.0);
    const HyperDual r = s * s * s;
    CHECK(r.v == 8.0);
    CHECK(r.d1 == 12.0);
    CHECK(r.d2 == 12.0);
    CHECK(r.d12 == 12.0);
}

TEST_CASE("product rule fills the mixed slot") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const HyperDual a{u(rng), u(rng), u(rng), u(rng)};
        const HyperDual b{u(rng), u(rng), u(rng), u(rng)};
        const HyperDual p = a * b;
        CHECK(p.d12 ==
              doctest::Approx(a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v)
                  .epsilon(1e-14));
    }
}

TEST_CASE("polynomials differentiate exactly") {
    // 3x^4 - 2x^2 + 7x - 1 at dyadic x keeps every operation exact.
    const double x = 1.5;
    const HyperDual s = HyperDual::variable(x);
    const HyperDual p = HyperDual(3.0) * s * s * s * s - HyperDual(2.0) * s * s +
                        HyperDual(7.0) * s - HyperDual(1.0);
    CHECK(p.v == 3 * x * x * x * x - 2 * x * x + 7 * x - 1);
    CHECK(p.d1 == 12 * x * x * x - 4 * x + 7);
    CHECK(p.d12 == 36 * x * x - 4);
}

TEST_CASE("reciprocal and division") {
    const HyperDual r = HyperDual(1.0) / HyperDual::variable(2.0);
    CHECK(r.v == 0.5);
    CHECK(r.d1 == -0.25);
    CHECK(r.d12 == 0.25);  // 2/x^3 at x = 2
    CHECK_THROWS_AS(fklattice::reciprocal(HyperDual::variable(0.0)),
                    std::domain_error);
}

TEST_CASE("chained transcendentals match finite differences") {
    auto hd = [](HyperDual x) {
        return exp(sin(x) * sin(x)) + log(x + HyperDual(3.0)) * cos(x);
    };
    auto scalar = [](double x) {
        return std::exp(std::sin(x) * std::sin(x)) + std::log(x + 3.0) * std::cos(x);
    };
    const double h = 1e-5;
    for (double x : {-0.7, 0.1, 0.9, 2.3}) {
        const HyperDual r = hd(HyperDual::variable(x));
        const double d1 = (scalar(x + h) - scalar(x - h)) / (2 * h);
        const double d2 = (scalar(x + h) - 2 * scalar(x) + scalar(x - h)) / (h * h);
        CHECK(r.v == doctest::Approx(scalar(x)).epsilon(1e-14));
        CHECK(r.d1 == doctest::Approx(d1).epsilon(1e-8));
        CHECK(r.d12 == doctest::Approx(d2).epsilon(1e-5));
    }
}

TEST_CASE("no NaN on the valid domain") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const HyperDual x = HyperDual::variable(u(rng));
        for (const HyperDual& r :
             {exp(x), log(x), sin(x), cos(x), sqrt(x), pow(x, 2.5), abs(-x)}) {
            CHECK(std::isfinite(r.v));
            CHECK(std::isfinite(r.d1));
            CHECK(std::isfinite(r.d2));
            CHECK(std::isfinite(r.d12));
        }
    }
}

TEST_CASE("domain violations throw") {
    CHECK_THROWS_AS(log(HyperDual::variable(-1.0)), std::domain_error);
    CHECK_THROWS_AS(log(HyperDual::variable(0.0)), std::domain_error);
    CHECK_THROWS_AS(sqrt(HyperDual::variable(-2.0)), std::domain_error);
    CHECK_THROWS_AS(pow(HyperDual::variable(-1.0), 0.5), std::domain_error);
}
