#include <doctest.h>

#include <cmath>

#include "fklattice/config.hpp"
#include "fklattice/engine.hpp"

using namespace fklattice;

namespace {

BoundaryPair parabolic() {
    return BoundaryPair{[](double t) { return -4.0 + t * t; },
                        [](double t) { return 4.0 - t * t; }};
}

Problem boundary_problem(BoundaryPair bounds) {
    Problem p;
    p.model = DiffusionModel::driftless(0.0);
    p.bounds = std::move(bounds);
    return p;
}

}  // namespace

TEST_CASE("wide boundaries and unit payoff price to almost one") {
    for (int n : {10, 16, 32}) {
        const PriceResult r =
            price(boundary_problem(BoundaryPair::constant(-10.0, 10.0)), {n, 2.0, 0.0});
        CHECK(r.q.real() >= 0.999);
        CHECK(r.q.real() <= 1.0 + 1e-12);
        CHECK(std::abs(r.q.imag()) < 1e-12);
    }
}

TEST_CASE("zero payoff annihilates") {
    Problem p = boundary_problem(parabolic());
    p.payoff.phi = [](double) { return 0.0; };
    CHECK(price(p, {30, 2.0, 0.0}).q == Complex(0.0, 0.0));
}

TEST_CASE("complex potential yields a genuinely complex price of modulus <= 1") {
    const BuiltProblem built = build_problem(preset("example1"));
    const PriceResult r = price(built.problem, built.scheme);
    CHECK(std::isfinite(r.q.real()));
    CHECK(std::isfinite(r.q.imag()));
    CHECK(std::abs(r.q) <= 1.0);
    CHECK(std::abs(r.q.imag()) > 0.01);
    CHECK(r.n == 30);
    CHECK(r.layer_count == 31);
}

TEST_CASE("forward and backward passes agree to twelve digits") {
    for (const char* name : {"example1", "example2", "example3"}) {
        CAPTURE(name);
        const BuiltProblem built = build_problem(preset(name));
        const PriceResult forward = price(built.problem, built.scheme,
                                          {built.quad_order});
        const ValueSurface surface = value_surface(built.problem, built.scheme,
                                                   {built.quad_order});
        REQUIRE(surface.layers[0].values.size() == 1);
        const Complex backward = surface.layers[0].values[0];
        CHECK(std::abs(forward.q - backward) <= 1e-12 * std::abs(forward.q));
    }
}

TEST_CASE("terminal surface layer holds the payoff samples exactly") {
    Problem p = boundary_problem(parabolic());
    p.payoff.phi = [](double x) { return std::cos(x); };
    const SchemeParams params{20, 2.0, 0.0};
    const ValueSurface surface = value_surface(p, params);
    const ValueSurface::Layer& last = surface.layers[20];
    REQUIRE(!last.nodes.empty());
    for (std::size_t j = 0; j < last.nodes.size(); ++j) {
        CHECK(last.values[static_cast<long>(j)] ==
              Complex(std::cos(last.nodes[j]), 0.0));
    }
    CHECK(last.t == 1.0);
}

TEST_CASE("bond problem surface is real, positive, and discount-bounded") {
    const BuiltProblem built = build_problem(preset("example2"));
    const ValueSurface surface = value_surface(built.problem, built.scheme);
    // Rates live in |r| <= 0.06, so values cannot exceed exp(0.06).
    const double cap = std::exp(0.06) + 1e-12;
    for (const ValueSurface::Layer& layer : surface.layers) {
        for (long j = 0; j < layer.values.size(); ++j) {
            CHECK(layer.values[j].real() > 0.0);
            CHECK(layer.values[j].real() <= cap);
            CHECK(std::abs(layer.values[j].imag()) < 1e-12);
        }
    }
}

TEST_CASE("values die out near the barriers") {
    const BuiltProblem built = build_problem(preset("example1"));
    const ValueSurface surface = value_surface(built.problem, built.scheme);
    const ValueSurface::Layer& mid = surface.layers[15];
    double peak = 0.0;
    for (long j = 0; j < mid.values.size(); ++j)
        peak = std::max(peak, std::abs(mid.values[j]));
    CHECK(std::abs(mid.values[0]) < 0.3 * peak);
    CHECK(std::abs(mid.values[mid.values.size() - 1]) < 0.3 * peak);
}

TEST_CASE("pure survival probability stays in the unit interval") {
    const PriceResult r =
        price(boundary_problem(BoundaryPair::constant(-1.0, 1.0)), {64, 2.0, 0.0});
    CHECK(r.q.real() >= 0.0);
    CHECK(r.q.real() <= 1.0 + 1e-12);
    // Classical reflection value of P(sup |W| < 1) on the unit horizon.
    CHECK(r.q.real() == doctest::Approx(0.3707774).epsilon(3e-4));
}

TEST_CASE("stronger killing lowers the price") {
    Problem weak = boundary_problem(parabolic());
    weak.potential = Potential::zero();
    Problem strong = boundary_problem(parabolic());
    strong.potential =
        Potential::smooth([](double x) { return Complex(x * x, 0.0); });
    const SchemeParams params{24, 2.0, 0.0};
    CHECK(price(weak, params).q.real() >= price(strong, params).q.real());
}

TEST_CASE("nested strips never raise the price") {
    const SchemeParams params{32, 2.0, 0.0};
    const PriceResult wide = price(boundary_problem(parabolic()), params);
    const PriceResult narrow = price(
        boundary_problem(BoundaryPair{[](double t) { return -3.0 + t * t; },
                                      [](double t) { return 3.0 - t * t; }}),
        params);
    CHECK(narrow.q.real() <= wide.q.real());
}

TEST_CASE("least squares line recovers an exact fit") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{-1.0, -4.0, -7.0, -10.0};
    const LineFit fit = least_squares_line(x, y);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(least_squares_line({1.0}, {2.0}), std::invalid_argument);
}

TEST_CASE("flat problems flag a degenerate convergence fit") {
    const Problem p = boundary_problem(BoundaryPair::constant(-10.0, 10.0));
    const ConvergenceResult r =
        convergence_study(p, {16, 2.0, 0.0}, {16, 24, 32, 48});
    CHECK(r.degenerate);
    for (const ConvergencePoint& pt : r.points)
        CHECK(pt.diff_abs < 1e-10);
}

TEST_CASE("convergence study checks its n list") {
    const Problem p = boundary_problem(parabolic());
    CHECK_THROWS_AS(convergence_study(p, {16, 2.0, 0.0}, {16}),
                    std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(p, {16, 2.0, 0.0}, {24, 16}),
                    std::invalid_argument);
}

TEST_CASE("default n ladder") {
    CHECK(default_n_list() == std::vector<int>{16, 24, 32, 48, 64, 96, 128});
}

TEST_CASE("hull-white transform produces the scaled unit-diffusion problem") {
    const BoundaryPair rate_bounds{
        [](double t) { return -0.04 * (1 + 0.5 * std::sin(3 * t)); },
        [](double t) { return 0.04 * (1 - 0.5 * std::sin(3 * t)); }};
    const Problem p =
        hull_white_problem(0.01, 0.01, parse("0.03"), rate_bounds);

    CHECK(p.model.x0 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.bounds.upper(0.25) ==
          doctest::Approx(4.0 * (1 - 0.5 * std::sin(0.75))).epsilon(1e-14));
    CHECK(p.bounds.lower(0.25) ==
          doctest::Approx(-4.0 * (1 + 0.5 * std::sin(0.75))).epsilon(1e-14));

    // theta(t) = alpha f + sigma^2/(2 alpha) (1 - exp(-2 alpha t)) for flat f;
    // drift of the scaled state is (theta - alpha sigma x) / sigma.
    auto theta = [](double t) {
        return 0.0003 + 0.005 * (1.0 - std::exp(-0.02 * t));
    };
    for (double t : {0.0, 0.5, 1.0})
        for (double x : {-1.0, 3.0}) {
            CHECK(p.model.drift(t, x) ==
                  doctest::Approx((theta(t) - 0.01 * 0.01 * x) / 0.01).epsilon(1e-12));
            CHECK(p.model.drift_dx(t, x) == doctest::Approx(-0.01).epsilon(1e-15));
            CHECK(p.model.drift_dxx(t, x) == 0.0);
            CHECK(p.model.drift_dt(t, x) ==
                  doctest::Approx(0.01 * std::exp(-0.02 * t)).epsilon(1e-12));
        }

    CHECK(p.potential(2.5) == Complex(0.025, 0.0));
    CHECK(p.payoff.phi(1.23) == 1.0);

    CHECK_THROWS_AS(hull_white_problem(-0.01, 0.01, parse("0.03"), rate_bounds),
                    std::invalid_argument);
    CHECK_THROWS_AS(hull_white_problem(0.01, 0.0, parse("0.03"), rate_bounds),
                    std::invalid_argument);
    CHECK_THROWS_AS(hull_white_problem(0.01, 0.01, parse("0.03 + x"), rate_bounds),
                    std::invalid_argument);
}

TEST_CASE("hull-white r0 override and curved forward rates") {
    const BoundaryPair rate_bounds = BoundaryPair::constant(-0.05, 0.05);
    const Problem p = hull_white_problem(0.02, 0.01, parse("0.03 + 0.01*t"),
                                         rate_bounds, 0.004);
    CHECK(p.model.x0 == doctest::Approx(0.4).epsilon(1e-15));
    // theta picks up f'(t) = 0.01.
    const double theta0 = 0.01 + 0.02 * 0.03;
    CHECK(p.model.drift(0.0, 0.0) == doctest::Approx(theta0 / 0.01).epsilon(1e-12));
}

TEST_CASE("grid stats accumulate over layers") {
    const BuiltProblem built = build_problem(preset("example1"));
    const PriceResult r = price(built.problem, built.scheme);
    CHECK(r.grid.nodes_max == 359);
    CHECK(r.grid.nodes_total > 2000);
    CHECK(r.grid.clamped_entries == 0);
}
