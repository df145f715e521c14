#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fklattice {

using Complex = std::complex<double>;

/// Unit-diffusion process dX = mu(t, X) dt + dW on [0, 1]. The four drift
/// callbacks must agree (the partials really are the partials of drift);
/// they are either generated together from one expression via hyper-dual
/// evaluation or supplied directly, e.g. by the Hull-White transform.
struct DiffusionModel {
    double x0 = 0.0;
    std::function<double(double, double)> drift;
    std::function<double(double, double)> drift_dt;
    std::function<double(double, double)> drift_dx;
    std::function<double(double, double)> drift_dxx;

    static DiffusionModel driftless(double x0);
};

/// Curvilinear barriers g-(t) < g+(t). Callbacks must be pure.
struct BoundaryPair {
    std::function<double(double)> lower;
    std::function<double(double)> upper;

    static BoundaryPair constant(double lo, double hi);
};

/// Killing rate V. Either an arbitrary complex-valued function or the
/// occupation-level form kappa * 1{x > level}, which the transition kernel
/// must recognise to switch to the sojourn-time weight.
class Potential {
public:
    static Potential zero();
    static Potential smooth(std::function<Complex(double)> v);
    static Potential step(double kappa, double level);

    bool is_step() const { return step_; }
    double kappa() const { return kappa_; }
    double level() const { return level_; }

    /// V(x). For the step form the indicator is strict: V(level) = 0.
    Complex operator()(double x) const {
        if (step_) return Complex(x > level_ ? kappa_ : 0.0, 0.0);
        return fn_(x);
    }

private:
    Potential() = default;
    bool step_ = false;
    double kappa_ = 0.0;
    double level_ = 0.0;
    std::function<Complex(double)> fn_;
};

struct Payoff {
    std::function<double(double)> phi;

    static Payoff one();
};

/// Scheme parameters: n uniform time steps on [0,1], gamma nodes-per-unit
/// density, delta grid refinement exponent in [0, 1/2].
struct SchemeParams {
    int n = 30;
    double gamma = 2.0;
    double delta = 0.0;
};

/// One fully specified pricing problem.
struct Problem {
    DiffusionModel model;
    BoundaryPair bounds;
    Potential potential = Potential::zero();
    Payoff payoff = Payoff::one();
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks strip membership of x0, positive strip width on a 1000-point time
/// sample, admissibility of delta, and positivity of every lattice floor
/// denominator for k = 1..n. Side-effect free.
ValidationReport validate_problem(const DiffusionModel& model,
                                  const BoundaryPair& bounds,
                                  const SchemeParams& params);

}  // namespace fklattice
