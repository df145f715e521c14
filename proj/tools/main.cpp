#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fklattice/config.hpp"
#include "fklattice/engine.hpp"
#include "fklattice/io.hpp"
#include "fklattice/mc.hpp"

namespace {

using fklattice::BuiltProblem;
using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
    std::string config_path;
    std::string preset_name;
    std::optional<int> n_override;
    std::optional<int> quad_override;
    std::optional<double> kappa_override;
    bool pretty = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    auto* config = cmd->add_option("--config", args.config_path,
                                   "problem description file (JSON)");
    auto* preset = cmd->add_option("--preset", args.preset_name,
                                   "built-in problem: example1|example2|example3");
    config->excludes(preset);
    cmd->add_option("--n", args.n_override, "override time-step count");
    cmd->add_option("--quad-order", args.quad_override,
                    "Gauss-Legendre order for the sojourn weight");
    cmd->add_option("--kappa", args.kappa_override,
                    "override the step-potential killing rate");
    cmd->add_flag("--json", args.pretty, "pretty-print the JSON summary");
}

void emit(const json& j, bool pretty) {
    if (pretty)
        std::cout << j.dump(2) << '\n';
    else
        std::cout << j.dump() << '\n';
}

BuiltProblem load(const CommonArgs& args) {
    if (args.config_path.empty() == args.preset_name.empty())
        throw fklattice::ConfigError("exactly one of --config or --preset is required");
    fklattice::ProblemConfig cfg = args.preset_name.empty()
                                       ? fklattice::load_config(args.config_path)
                                       : fklattice::preset(args.preset_name);
    if (args.n_override) cfg.scheme.n = *args.n_override;
    if (args.quad_override) cfg.quad_order = *args.quad_override;

    BuiltProblem built = fklattice::build_problem(cfg);
    if (args.kappa_override) {
        if (!built.problem.potential.is_step())
            throw fklattice::ConfigError("--kappa requires a step potential");
        if (*args.kappa_override < 0.0)
            throw fklattice::ConfigError("--kappa must be >= 0");
        built.problem.potential = fklattice::Potential::step(
            *args.kappa_override, built.problem.potential.level());
    }
    return built;
}

void require_valid(const BuiltProblem& built) {
    const fklattice::ValidationReport report = fklattice::validate_problem(
        built.problem.model, built.problem.bounds, built.scheme);
    if (!report.ok()) {
        for (const std::string& v : report.violations)
            std::cerr << "validation: " << v << '\n';
        std::exit(kExitValidation);
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw fklattice::ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out.good())
        throw fklattice::ConfigError("error writing '" + path + "'");
}

json grid_json(const fklattice::PriceResult& r) {
    return json{{"layers", r.layer_count},
                {"nodes_total", r.grid.nodes_total},
                {"nodes_max", r.grid.nodes_max},
                {"clamped_entries", r.grid.clamped_entries}};
}

int run_price(const CommonArgs& args) {
    const BuiltProblem built = load(args);
    require_valid(built);
    const fklattice::PriceResult r =
        fklattice::price(built.problem, built.scheme, {built.quad_order});
    emit(json{{"n", r.n},
              {"q_re", r.q.real()},
              {"q_im", r.q.imag()},
              {"runtime_ms", r.wall_time_ms},
              {"grid", grid_json(r)}},
         args.pretty);
    return 0;
}

int run_surface(const CommonArgs& args, const std::string& out_path) {
    const BuiltProblem built = load(args);
    require_valid(built);
    const fklattice::ValueSurface surface =
        fklattice::value_surface(built.problem, built.scheme, {built.quad_order});
    const std::string csv = fklattice::surface_csv(surface);
    write_file(out_path, csv);
    long rows = 0;
    for (const auto& layer : surface.layers) rows += static_cast<long>(layer.nodes.size());
    emit(json{{"out", out_path}, {"rows", rows}, {"layers", surface.layers.size()}},
         args.pretty);
    return 0;
}

int run_convergence(const CommonArgs& args, const std::vector<int>& n_list,
                    const std::string& out_path) {
    const BuiltProblem built = load(args);
    require_valid(built);
    const std::vector<int> ns = n_list.empty() ? fklattice::default_n_list() : n_list;
    const fklattice::ConvergenceResult result = fklattice::convergence_study(
        built.problem, built.scheme, ns, {built.quad_order});
    if (!out_path.empty())
        write_file(out_path, fklattice::convergence_csv(result));
    json j{{"n_list", ns}, {"degenerate", result.degenerate}};
    if (result.degenerate) {
        j["slope"] = nullptr;
        j["r2"] = nullptr;
    } else {
        j["slope"] = result.fit.slope;
        j["r2"] = result.fit.r2;
    }
    emit(j, args.pretty);
    return 0;
}

int run_mc(const CommonArgs& args, long paths, int steps, std::uint64_t seed) {
    const BuiltProblem built = load(args);
    require_valid(built);
    const fklattice::McEstimate est =
        fklattice::mc_price(built.problem, steps, paths, seed);
    const fklattice::PriceResult engine =
        fklattice::price(built.problem, built.scheme, {built.quad_order});

    // Componentwise z-score; a zero-variance component (e.g. the imaginary
    // part of a real problem) only has to agree to rounding.
    double z = 0.0;
    const double diff_re = std::abs(engine.q.real() - est.mean.real());
    const double diff_im = std::abs(engine.q.imag() - est.mean.imag());
    z = est.se_re > 0.0 ? diff_re / est.se_re : (diff_re < 1e-12 ? 0.0 : HUGE_VAL);
    const double z_im =
        est.se_im > 0.0 ? diff_im / est.se_im : (diff_im < 1e-12 ? 0.0 : HUGE_VAL);
    z = std::max(z, z_im);

    emit(json{{"mean_re", est.mean.real()},
              {"mean_im", est.mean.imag()},
              {"se", std::max(est.se_re, est.se_im)},
              {"se_re", est.se_re},
              {"se_im", est.se_im},
              {"paths", est.paths},
              {"steps", est.steps_per_path},
              {"seed", est.seed},
              {"engine_n", engine.n},
              {"engine_q_re", engine.q.real()},
              {"engine_q_im", engine.q.imag()},
              {"z_score", z}},
         args.pretty);
    return 0;
}

int run_validate(const CommonArgs& args) {
    const BuiltProblem built = load(args);
    const fklattice::ValidationReport report = fklattice::validate_problem(
        built.problem.model, built.problem.bounds, built.scheme);
    emit(json{{"valid", report.ok()}, {"violations", report.violations}}, args.pretty);
    return report.ok() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feynman-Kac expectations of diffusions killed at two "
                 "curvilinear boundaries"};
    app.require_subcommand(1);

    CommonArgs price_args, surface_args, conv_args, mc_args, validate_args;
    std::string surface_out;
    std::string conv_out;
    std::vector<int> conv_n_list;
    long mc_paths = 1000000;
    int mc_steps = 2000;
    std::uint64_t mc_seed = 20240801;

    CLI::App* price_cmd = app.add_subcommand("price", "expectation at the configured n");
    add_common(price_cmd, price_args);

    CLI::App* surface_cmd =
        app.add_subcommand("surface", "value surface v(t, x) as CSV");
    add_common(surface_cmd, surface_args);
    surface_cmd->add_option("--out", surface_out, "output CSV path")->required();

    CLI::App* conv_cmd = app.add_subcommand(
        "convergence", "self-difference decay table and log-log slope");
    add_common(conv_cmd, conv_args);
    conv_cmd->add_option("--n-list", conv_n_list, "increasing n values")
        ->delimiter(',');
    conv_cmd->add_option("--out", conv_out, "output CSV path");

    CLI::App* mc_cmd =
        app.add_subcommand("mc", "Monte Carlo cross-check against the engine");
    add_common(mc_cmd, mc_args);
    mc_cmd->add_option("--paths", mc_paths, "number of simulated paths");
    mc_cmd->add_option("--steps", mc_steps, "Euler steps per path");
    mc_cmd->add_option("--seed", mc_seed, "PRNG seed");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check the problem without pricing");
    add_common(validate_cmd, validate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (price_cmd->parsed()) return run_price(price_args);
        if (surface_cmd->parsed()) return run_surface(surface_args, surface_out);
        if (conv_cmd->parsed())
            return run_convergence(conv_args, conv_n_list, conv_out);
        if (mc_cmd->parsed()) return run_mc(mc_args, mc_paths, mc_steps, mc_seed);
        if (validate_cmd->parsed()) return run_validate(validate_args);
    } catch (const fklattice::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
