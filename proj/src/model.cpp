#include "fklattice/model.hpp"

#include <cmath>
#include <sstream>

namespace fklattice {

DiffusionModel DiffusionModel::driftless(double x0) {
    auto zero = [](double, double) { return 0.0; };
    return DiffusionModel{x0, zero, zero, zero, zero};
}

BoundaryPair BoundaryPair::constant(double lo, double hi) {
    return BoundaryPair{[lo](double) { return lo; }, [hi](double) { return hi; }};
}

Potential Potential::zero() {
    return smooth([](double) { return Complex(0.0, 0.0); });
}

Potential Potential::smooth(std::function<Complex(double)> v) {
    Potential p;
    p.fn_ = std::move(v);
    return p;
}

Potential Potential::step(double kappa, double level) {
    Potential p;
    p.step_ = true;
    p.kappa_ = kappa;
    p.level_ = level;
    return p;
}

Payoff Payoff::one() {
    return Payoff{[](double) { return 1.0; }};
}

namespace {

std::string format_time(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

}  // namespace

ValidationReport validate_problem(const DiffusionModel& model,
                                  const BoundaryPair& bounds,
                                  const SchemeParams& params) {
    ValidationReport report;

    if (params.n < 1)
        report.violations.push_back("n must be a positive integer");
    if (!(params.gamma > 0.0))
        report.violations.push_back("gamma must be positive");
    if (params.delta < 0.0 || params.delta > 0.5)
        report.violations.push_back("delta must lie in [0, 1/2]");

    const double g_lo0 = bounds.lower(0.0);
    const double g_hi0 = bounds.upper(0.0);
    if (!(g_lo0 < model.x0 && model.x0 < g_hi0))
        report.violations.push_back("x0 outside strip at t=0");

    // Strip positivity on a dense sample; boundaries are opaque callbacks.
    constexpr int kSamples = 1000;
    for (int j = 0; j <= kSamples; ++j) {
        const double t = static_cast<double>(j) / kSamples;
        const double width = bounds.upper(t) - bounds.lower(t);
        if (!(width > 0.0)) {
            report.violations.push_back("strip width nonpositive at t=" + format_time(t));
            break;
        }
        if (!std::isfinite(width)) {
            report.violations.push_back("boundary not finite at t=" + format_time(t));
            break;
        }
    }

    if (params.n >= 1 && params.gamma > 0.0 && params.delta >= 0.0 &&
        params.delta <= 0.5) {
        const double dt = 1.0 / params.n;
        for (int k = 1; k <= params.n; ++k) {
            const double t = static_cast<double>(k) / params.n;
            const double width = bounds.upper(t) - bounds.lower(t);
            if (!(width > 0.0))
                break;  // already reported above
            const double scale =
                k < params.n ? std::pow(dt, 0.5 + params.delta) : dt;
            if (std::floor(params.gamma * width / scale) < 1.0) {
                report.violations.push_back(
                    "grid too coarse: floor denominator vanishes at k=" +
                    std::to_string(k));
                break;
            }
        }
    }

    return report;
}

}  // namespace fklattice
