#include <doctest.h>

#include <cmath>

#include "fklattice/config.hpp"
#include "fklattice/engine.hpp"
#include "fklattice/mc.hpp"
#include "fklattice/quadrature.hpp"

using namespace fklattice;

namespace {

// Reflection series for P(sup_{[0,1]} |W| < 1); terms decay factorially
// fast, |k| <= 8 is far below 1e-12.
double two_sided_unit_band_probability() {
    double sum = 0.0;
    for (int k = -8; k <= 8; ++k) {
        const double term =
            norm_cdf(2.0 * k + 1.0) - norm_cdf(2.0 * k - 1.0);
        sum += (k % 2 == 0 ? term : -term);
    }
    return sum;
}

Problem unit_band_problem() {
    Problem p;
    p.model = DiffusionModel::driftless(0.0);
    p.bounds = BoundaryPair::constant(-1.0, 1.0);
    return p;
}

}  // namespace

TEST_CASE("zero payoff gives a zero estimate with zero error") {
    Problem p = unit_band_problem();
    p.payoff.phi = [](double) { return 0.0; };
    const McEstimate est = mc_price(p, 100, 2000, 7);
    CHECK(est.mean == Complex(0.0, 0.0));
    CHECK(est.se_re == 0.0);
    CHECK(est.se_im == 0.0);
}

TEST_CASE("band non-crossing probability matches the reflection series") {
    const double reference = two_sided_unit_band_probability();
    CHECK(reference == doctest::Approx(0.3707774).epsilon(1e-6));

    const McEstimate est = mc_price(unit_band_problem(), 400, 60000, 2024);
    CHECK(est.mean.imag() == 0.0);
    CHECK(std::abs(est.mean.real() - reference) < 4.0 * est.se_re + 1e-3);
}

TEST_CASE("fixed seeds reproduce the estimate bit for bit") {
    const McEstimate a = mc_price(unit_band_problem(), 150, 3000, 42);
    const McEstimate b = mc_price(unit_band_problem(), 150, 3000, 42);
    CHECK(a.mean.real() == b.mean.real());
    CHECK(a.mean.imag() == b.mean.imag());
    CHECK(a.se_re == b.se_re);

    const McEstimate c = mc_price(unit_band_problem(), 150, 3000, 43);
    CHECK(a.mean.real() != c.mean.real());
}

TEST_CASE("standard error shrinks like the square root of the path count") {
    const McEstimate small = mc_price(unit_band_problem(), 150, 8000, 11);
    const McEstimate large = mc_price(unit_band_problem(), 150, 32000, 11);
    const double ratio = large.se_re / small.se_re;
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
}

TEST_CASE("size preconditions are enforced") {
    CHECK_THROWS_AS(mc_price(unit_band_problem(), 99, 2000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_price(unit_band_problem(), 150, 999, 1),
                    std::invalid_argument);
}

TEST_CASE("step-count bias is within combined noise on the parabolic band") {
    Problem p;
    p.model = DiffusionModel::driftless(0.0);
    p.bounds = BoundaryPair{[](double t) { return -4.0 + t * t; },
                            [](double t) { return 4.0 - t * t; }};
    const McEstimate coarse = mc_price(p, 500, 60000, 5);
    const McEstimate fine = mc_price(p, 2000, 60000, 6);
    const double combined =
        std::sqrt(coarse.se_re * coarse.se_re + fine.se_re * fine.se_re);
    CHECK(std::abs(coarse.mean.real() - fine.mean.real()) < 3.0 * combined);
}

TEST_CASE("oracle brackets the engine on the bond problem") {
    const BuiltProblem built = build_problem(preset("example2"));
    const PriceResult engine = price(built.problem, built.scheme);
    const McEstimate est = mc_price(built.problem, 400, 40000, 314159);
    CHECK(std::abs(est.mean.real() - engine.q.real()) < 5.0 * est.se_re + 2e-3);
    CHECK(est.se_im == 0.0);
}

TEST_CASE("oracle brackets the engine on the complex potential") {
    const BuiltProblem built = build_problem(preset("example1"));
    const PriceResult engine = price(built.problem, built.scheme);
    const McEstimate est = mc_price(built.problem, 400, 30000, 2718);
    CHECK(std::abs(est.mean.real() - engine.q.real()) < 5.0 * est.se_re + 2e-3);
    CHECK(std::abs(est.mean.imag() - engine.q.imag()) < 5.0 * est.se_im + 2e-3);
}
