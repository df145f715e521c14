#include "fklattice/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fklattice/engine.hpp"
#include "fklattice/expr.hpp"

namespace fklattice {

namespace {

using nlohmann::json;

ProblemConfig from_json(const json& j) {
    ProblemConfig cfg;
    try {
        cfg.lower = j.at("lower").get<std::string>();
        cfg.upper = j.at("upper").get<std::string>();
        if (j.contains("drift")) cfg.drift = j["drift"].get<std::string>();
        if (j.contains("potential")) cfg.potential = j["potential"].get<std::string>();
        if (j.contains("payoff")) cfg.payoff = j["payoff"].get<std::string>();
        if (j.contains("x0")) cfg.x0 = j["x0"].get<double>();
        if (j.contains("scheme")) {
            const json& s = j["scheme"];
            if (s.contains("n")) cfg.scheme.n = s["n"].get<int>();
            if (s.contains("gamma")) cfg.scheme.gamma = s["gamma"].get<double>();
            if (s.contains("delta")) cfg.scheme.delta = s["delta"].get<double>();
        }
        if (j.contains("quad_order")) cfg.quad_order = j["quad_order"].get<int>();
        if (j.contains("hull_white")) {
            const json& hw = j["hull_white"];
            HullWhiteConfig h;
            h.alpha = hw.at("alpha").get<double>();
            h.sigma = hw.at("sigma").get<double>();
            h.forward_curve = hw.at("forward_curve").get<std::string>();
            cfg.hull_white = h;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExprPtr parse_field(const std::string& src, const std::string& field) {
    try {
        return parse(src);
    } catch (const SyntaxError& e) {
        throw ConfigError("config field '" + field + "': " + e.what());
    } catch (const UnknownIdentifier& e) {
        throw ConfigError("config field '" + field + "': " + e.what());
    }
}

// Recognise kappa * step(x, r) (in either order), a bare step(x, r), and
// constant sub-expressions for kappa and r. The sojourn-time correction is
// a semantic property of the step form, so it is detected structurally
// rather than by sampling for discontinuities.
struct StepForm {
    double kappa;
    double level;
};

std::optional<StepForm> match_step_call(const Expr& e) {
    const auto* call = std::get_if<Expr::Call>(&e.node);
    if (!call || call->fn != Func::Step) return std::nullopt;
    const auto* var = std::get_if<Expr::Var>(&call->args[0]->node);
    if (!var || var->name != 'x') return std::nullopt;
    const std::optional<double> level = fold_real_constant(*call->args[1]);
    if (!level) return std::nullopt;
    return StepForm{1.0, *level};
}

std::optional<StepForm> match_step_potential(const Expr& e) {
    if (auto direct = match_step_call(e)) return direct;
    const auto* bin = std::get_if<Expr::Bin>(&e.node);
    if (!bin || bin->op != BinOp::Mul) return std::nullopt;
    if (auto rhs = match_step_call(*bin->rhs)) {
        if (auto k = fold_real_constant(*bin->lhs))
            return StepForm{*k * rhs->kappa, rhs->level};
        return std::nullopt;
    }
    if (auto lhs = match_step_call(*bin->lhs)) {
        if (auto k = fold_real_constant(*bin->rhs))
            return StepForm{*k * lhs->kappa, lhs->level};
    }
    return std::nullopt;
}

DiffusionModel model_from_expr(double x0, ExprPtr drift) {
    DiffusionModel model;
    model.x0 = x0;
    if (contains_imag(*drift))
        throw ConfigError("config field 'drift': must be real-valued");
    if (auto c = fold_real_constant(*drift)) {
        // Constant drift: skip per-call AST evaluation on hot paths.
        const double value = *c;
        model.drift = [value](double, double) { return value; };
        model.drift_dt = [](double, double) { return 0.0; };
        model.drift_dx = [](double, double) { return 0.0; };
        model.drift_dxx = [](double, double) { return 0.0; };
        return model;
    }
    model.drift = [drift](double t, double x) {
        Bindings<double> b;
        b.t = t;
        b.x = x;
        return eval(*drift, b);
    };
    model.drift_dt = [drift](double t, double x) {
        return drift_partials(*drift, t, x).dt;
    };
    model.drift_dx = [drift](double t, double x) {
        return drift_partials(*drift, t, x).dx;
    };
    model.drift_dxx = [drift](double t, double x) {
        return drift_partials(*drift, t, x).dxx;
    };
    return model;
}

}  // namespace

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ProblemConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return from_json(j);
}

ProblemConfig preset(const std::string& name) {
    ProblemConfig cfg;
    cfg.scheme = SchemeParams{30, 2.0, 0.0};
    if (name == "example1") {
        cfg.x0 = 0.0;
        cfg.lower = "-4 + t^2";
        cfg.upper = "4 - t^2";
        cfg.drift = "0";
        cfg.potential = "-i*x^2";
    } else if (name == "example2") {
        cfg.lower = "-0.04*(1 + 0.5*sin(3*t))";
        cfg.upper = "0.04*(1 - 0.5*sin(3*t))";
        cfg.hull_white = HullWhiteConfig{0.01, 0.01, "0.03"};
    } else if (name == "example3") {
        cfg.x0 = 0.0;
        cfg.lower = "-4 + t^2";
        cfg.upper = "4 - t^2";
        cfg.drift = "0";
        cfg.potential = "2*step(x, 1/19)";
    } else {
        throw ConfigError("unknown preset '" + name +
                          "' (expected example1, example2, or example3)");
    }
    return cfg;
}

BuiltProblem build_problem(const ProblemConfig& config) {
    BuiltProblem built;
    built.scheme = config.scheme;
    built.quad_order = config.quad_order;
    if (config.quad_order < 2)
        throw ConfigError("config field 'quad_order': must be >= 2");

    const ExprPtr lower = parse_field(config.lower, "lower");
    const ExprPtr upper = parse_field(config.upper, "upper");
    BoundaryPair bounds;
    bounds.lower = [lower](double t) { return eval_real(*lower, t, std::nullopt); };
    bounds.upper = [upper](double t) { return eval_real(*upper, t, std::nullopt); };

    if (config.hull_white) {
        if (config.drift)
            throw ConfigError("config: 'hull_white' and 'drift' are mutually exclusive");
        if (config.potential)
            throw ConfigError(
                "config: 'hull_white' fixes the potential; drop the 'potential' field");
        const HullWhiteConfig& hw = *config.hull_white;
        if (!(hw.alpha > 0.0) || !(hw.sigma > 0.0))
            throw ConfigError("config field 'hull_white': alpha and sigma must be positive");
        const ExprPtr curve = parse_field(hw.forward_curve, "forward_curve");
        try {
            built.problem =
                hull_white_problem(hw.alpha, hw.sigma, curve, bounds, config.x0);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    } else {
        if (!config.x0)
            throw ConfigError("config: 'x0' is required without 'hull_white'");
        const ExprPtr drift = parse_field(config.drift.value_or("0"), "drift");
        built.problem.model = model_from_expr(*config.x0, drift);
        built.problem.bounds = bounds;

        const ExprPtr pot = parse_field(config.potential.value_or("0"), "potential");
        if (auto step = match_step_potential(*pot)) {
            if (step->kappa < 0.0)
                throw ConfigError("config field 'potential': step rate must be >= 0");
            built.problem.potential = Potential::step(step->kappa, step->level);
        } else {
            built.problem.potential = Potential::smooth([pot](double x) {
                return eval_complex(*pot, std::nullopt, x);
            });
        }
    }

    // Payoff applies to the engine state; under hull_white that is the
    // sigma-scaled coordinate.
    const ExprPtr payoff = parse_field(config.payoff, "payoff");
    if (contains_imag(*payoff))
        throw ConfigError("config field 'payoff': must be real-valued");
    built.problem.payoff.phi = [payoff](double x) {
        return eval_real(*payoff, std::nullopt, x);
    };
    return built;
}

}  // namespace fklattice
