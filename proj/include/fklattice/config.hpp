#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fklattice/model.hpp"

namespace fklattice {

/// Config-file or preset problem description; expression-valued fields use
/// the grammar documented in expr.hpp (boundaries and the forward curve in
/// t, drift in t and x, potential and payoff in x).
struct HullWhiteConfig {
    double alpha = 0.0;
    double sigma = 0.0;
    std::string forward_curve;
};

struct ProblemConfig {
    std::string lower;
    std::string upper;
    std::optional<std::string> drift;      // exclusive with hull_white
    std::optional<std::string> potential;  // defaults to "0"
    std::string payoff = "1";
    std::optional<double> x0;              // r(0) override under hull_white
    SchemeParams scheme;
    std::optional<HullWhiteConfig> hull_white;
    int quad_order = 16;
};

/// Malformed configuration (unreadable file, bad JSON, bad expression,
/// inconsistent fields). Distinct from problem-level validation failures.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config(const std::string& json_text);

/// Built-in parameter sets of the three reference experiments:
///   example1  complex quadratic potential between parabolic barriers
///   example2  Hull-White zero-coupon bond with sinusoidal knock-outs
///   example3  hybrid step-barrier option (kappa = 2, level = 1/19)
ProblemConfig preset(const std::string& name);

struct BuiltProblem {
    Problem problem;
    SchemeParams scheme;
    int quad_order = 16;
};

/// Parse all expressions, wire up autodiff drift partials (or the
/// Hull-White transform), and detect the k*step(x, r) potential form
/// structurally. Throws ConfigError.
BuiltProblem build_problem(const ProblemConfig& config);

}  // namespace fklattice
