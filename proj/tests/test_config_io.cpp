#include <doctest.h>

#include <cmath>
#include <random>

#include "fklattice/config.hpp"
#include "fklattice/engine.hpp"
#include "fklattice/io.hpp"

using namespace fklattice;

TEST_CASE("json config parses with defaults") {
    const ProblemConfig cfg = parse_config(R"({
        "x0": 0.5,
        "lower": "-2",
        "upper": "2",
        "scheme": {"n": 12}
    })");
    CHECK(cfg.x0 == 0.5);
    CHECK(cfg.lower == "-2");
    CHECK_FALSE(cfg.drift.has_value());
    CHECK_FALSE(cfg.potential.has_value());
    CHECK(cfg.payoff == "1");
    CHECK(cfg.scheme.n == 12);
    CHECK(cfg.scheme.gamma == 2.0);
    CHECK(cfg.scheme.delta == 0.0);
    CHECK(cfg.quad_order == 16);
}

TEST_CASE("malformed json is a config error") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"lower": "-2"})"), ConfigError);  // no upper
    CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("presets carry the reference parameter sets") {
    const ProblemConfig ex1 = preset("example1");
    CHECK(ex1.x0 == 0.0);
    CHECK(ex1.lower == "-4 + t^2");
    CHECK(ex1.upper == "4 - t^2");
    CHECK(*ex1.drift == "0");
    CHECK(*ex1.potential == "-i*x^2");
    CHECK(ex1.scheme.n == 30);
    CHECK(ex1.scheme.gamma == 2.0);
    CHECK(ex1.scheme.delta == 0.0);

    const ProblemConfig ex2 = preset("example2");
    REQUIRE(ex2.hull_white.has_value());
    CHECK(ex2.hull_white->alpha == 0.01);
    CHECK(ex2.hull_white->sigma == 0.01);
    CHECK(ex2.hull_white->forward_curve == "0.03");
    CHECK(ex2.lower == "-0.04*(1 + 0.5*sin(3*t))");
    CHECK(ex2.upper == "0.04*(1 - 0.5*sin(3*t))");

    const ProblemConfig ex3 = preset("example3");
    CHECK(*ex3.potential == "2*step(x, 1/19)");

    CHECK_THROWS_AS(preset("example9"), ConfigError);
}

TEST_CASE("step potential is recognised structurally") {
    ProblemConfig cfg = preset("example3");
    const BuiltProblem built = build_problem(cfg);
    CHECK(built.problem.potential.is_step());
    CHECK(built.problem.potential.kappa() == 2.0);
    CHECK(built.problem.potential.level() == doctest::Approx(1.0 / 19).epsilon(1e-15));

    // Commuted product and bare call.
    cfg.potential = "step(x, 0.25)*3";
    CHECK(build_problem(cfg).problem.potential.kappa() == 3.0);
    cfg.potential = "step(x, 0.25)";
    CHECK(build_problem(cfg).problem.potential.kappa() == 1.0);

    // Anything structurally different stays on the smooth path.
    cfg.potential = "0 + 2*step(x, 1/19)";
    CHECK_FALSE(build_problem(cfg).problem.potential.is_step());

    cfg.potential = "-2*step(x, 1/19)";
    CHECK_THROWS_AS(build_problem(cfg), ConfigError);
}

TEST_CASE("complex potential builds on the smooth path") {
    const BuiltProblem built = build_problem(preset("example1"));
    CHECK_FALSE(built.problem.potential.is_step());
    CHECK(built.problem.potential(2.0) == Complex(0.0, -4.0));
    CHECK(built.problem.model.drift(0.3, 1.5) == 0.0);
    CHECK(built.problem.payoff.phi(0.7) == 1.0);
}

TEST_CASE("config field conflicts are rejected") {
    ProblemConfig cfg = preset("example2");
    cfg.drift = "0";
    CHECK_THROWS_AS(build_problem(cfg), ConfigError);

    ProblemConfig pot = preset("example2");
    pot.potential = "x";
    CHECK_THROWS_AS(build_problem(pot), ConfigError);

    ProblemConfig no_x0 = preset("example1");
    no_x0.x0.reset();
    CHECK_THROWS_AS(build_problem(no_x0), ConfigError);

    ProblemConfig bad_expr = preset("example1");
    bad_expr.upper = "4 -";
    CHECK_THROWS_AS(build_problem(bad_expr), ConfigError);
}

TEST_CASE("checked-in config files match the presets") {
    for (const char* name : {"example1", "example2", "example3"}) {
        CAPTURE(name);
        const std::string path =
            std::string(FKLATTICE_SOURCE_DIR) + "/configs/" + name + ".json";
        const ProblemConfig file = load_config(path);
        const ProblemConfig built_in = preset(name);
        CHECK(file.lower == built_in.lower);
        CHECK(file.upper == built_in.upper);
        CHECK(file.drift == built_in.drift);
        CHECK(file.potential == built_in.potential);
        CHECK(file.scheme.n == built_in.scheme.n);
        CHECK(file.scheme.gamma == built_in.scheme.gamma);
        CHECK(file.scheme.delta == built_in.scheme.delta);
        CHECK(file.hull_white.has_value() == built_in.hull_white.has_value());
    }
}

TEST_CASE("expression-defined drift feeds consistent partials") {
    ProblemConfig cfg;
    cfg.x0 = 0.2;
    cfg.lower = "-3";
    cfg.upper = "3";
    cfg.drift = "0.1*t - 0.2*x + 0.05*x^2";
    cfg.scheme = SchemeParams{16, 2.0, 0.0};
    const BuiltProblem built = build_problem(cfg);
    const double t = 0.4, x = 0.9, h = 1e-5;
    const auto& m = built.problem.model;
    const double fd_dx = (m.drift(t, x + h) - m.drift(t, x - h)) / (2 * h);
    const double fd_dt = (m.drift(t + h, x) - m.drift(t - h, x)) / (2 * h);
    CHECK(m.drift_dx(t, x) == doctest::Approx(fd_dx).epsilon(1e-6));
    CHECK(m.drift_dt(t, x) == doctest::Approx(fd_dt).epsilon(1e-6));
    CHECK(m.drift_dxx(t, x) == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("surface csv layout and exact payoff rows") {
    const BuiltProblem built = build_problem(preset("example2"));
    SchemeParams small = built.scheme;
    small.n = 8;
    const ValueSurface surface = value_surface(built.problem, small);
    const std::string csv = surface_csv(surface);

    CHECK(csv.rfind("t,x,re_v,im_v\n", 0) == 0);
    const CsvTable table = parse_csv(csv);
    REQUIRE(table.header == std::vector<std::string>{"t", "x", "re_v", "im_v"});

    long expected_rows = 0;
    for (const auto& layer : surface.layers)
        expected_rows += static_cast<long>(layer.nodes.size());
    CHECK(static_cast<long>(table.rows.size()) == expected_rows);

    // Times are nondecreasing on the k/n ladder; imaginary parts vanish for
    // a real killing rate; terminal rows carry the payoff exactly.
    double prev_t = 0.0;
    for (const auto& row : table.rows) {
        CHECK(row[0] >= prev_t);
        prev_t = row[0];
        CHECK(std::abs(row[3]) < 1e-12);
    }
    for (auto it = table.rows.rbegin();
         it != table.rows.rend() && (*it)[0] == 1.0; ++it)
        CHECK((*it)[2] == 1.0);
}

TEST_CASE("csv emission round-trips byte for byte") {
    const BuiltProblem built = build_problem(preset("example1"));
    SchemeParams small = built.scheme;
    small.n = 10;
    const std::string csv = surface_csv(value_surface(built.problem, small));
    CHECK(emit_csv(parse_csv(csv)) == csv);

    const ConvergenceResult conv =
        convergence_study(built.problem, small, {10, 14, 18});
    const std::string conv_text = convergence_csv(conv);
    CHECK(emit_csv(parse_csv(conv_text)) == conv_text);
    CHECK(conv_text.rfind("n,q_re,q_im,diff_abs\n", 0) == 0);
}

TEST_CASE("seventeen significant digits round-trip doubles") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
        const std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
}
