#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fklattice/expr.hpp"
#include "fklattice/grid.hpp"
#include "fklattice/kernel.hpp"
#include "fklattice/model.hpp"

namespace fklattice {

struct PricingOptions {
    int quad_order = 16;  ///< Gauss-Legendre order for the sojourn weight
};

struct GridStats {
    long nodes_total = 0;
    long nodes_max = 0;
    long clamped_entries = 0;
};

struct PriceResult {
    int n = 0;
    Complex q;
    int layer_count = 0;
    double wall_time_ms = 0.0;
    GridStats grid;
};

/// Expectation of the discounted payoff over non-crossing paths,
/// approximated by the corrected transition-matrix chain. A single row
/// vector is propagated forward from the initial singleton layer; the
/// result is identical to the right-to-left matrix product.
PriceResult price(const Problem& problem, const SchemeParams& params,
                  const PricingOptions& options = {});

/// Discrete value surface: the backward pass v_n = payoff samples,
/// v_{k} = S_{k+1} v_{k+1}. Layer 0 reduces to the price.
struct ValueSurface {
    struct Layer {
        int k;
        double t;
        std::vector<double> nodes;
        Eigen::VectorXcd values;
    };
    std::vector<Layer> layers;  // k = 0..n
};

ValueSurface value_surface(const Problem& problem, const SchemeParams& params,
                           const PricingOptions& options = {});

/// Ordinary least squares on (x, y) pairs.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y);

struct ConvergencePoint {
    int n;
    Complex q_n;
    Complex q_next;      ///< value at n + 1
    double diff_abs;     ///< |Re q_next - Re q_n|
};

/// Self-difference decay study: computes Q at n and n+1 for every listed n
/// and fits log|Re Q_{n+1} - Re Q_n| against log n. Flagged degenerate when
/// the differences sit at noise level and the fit is meaningless.
struct ConvergenceResult {
    std::vector<ConvergencePoint> points;
    LineFit fit;
    bool degenerate = false;
};

ConvergenceResult convergence_study(const Problem& problem,
                                    const SchemeParams& base,
                                    const std::vector<int>& n_list,
                                    const PricingOptions& options = {});

/// Default n ladder for convergence studies.
std::vector<int> default_n_list();

/// Hull-White short-rate bond problem dr = (theta(t) - alpha r) dt
/// + sigma dW mapped to unit diffusion by scaling space with sigma:
/// state x = r / sigma, drift (theta(t) - alpha sigma x) / sigma,
/// killing rate V(x) = sigma x, unit payoff. theta is calibrated to the
/// instantaneous forward curve f, whose derivatives come from hyper-dual
/// evaluation; r0 defaults to f(0).
Problem hull_white_problem(double alpha, double sigma, ExprPtr forward_curve,
                           const BoundaryPair& rate_bounds,
                           std::optional<double> r0 = std::nullopt);

}  // namespace fklattice
