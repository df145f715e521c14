#include "fklattice/engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fklattice {

namespace {

GridStats stats_from_layers(const std::vector<LatticeLayer>& layers) {
    GridStats s;
    for (const LatticeLayer& layer : layers) {
        s.nodes_total += layer.node_count();
        s.nodes_max = std::max(s.nodes_max, layer.node_count());
    }
    return s;
}

Eigen::VectorXcd payoff_vector(const Problem& problem, const LatticeLayer& last) {
    Eigen::VectorXcd phi(last.node_count());
    for (long j = 0; j < phi.size(); ++j) {
        const double v = problem.payoff.phi(last.nodes[j]);
        if (!std::isfinite(v))
            throw std::runtime_error("payoff not finite on terminal layer");
        phi[j] = Complex(v, 0.0);
    }
    return phi;
}

}  // namespace

PriceResult price(const Problem& problem, const SchemeParams& params,
                  const PricingOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<LatticeLayer> layers =
        build_layers(problem.model.x0, problem.bounds, params);

    PriceResult result;
    result.n = params.n;
    result.layer_count = static_cast<int>(layers.size());
    result.grid = stats_from_layers(layers);

    Eigen::RowVectorXcd row;
    for (int k = 1; k <= params.n; ++k) {
        const TransitionLayer tl =
            assemble_layer(problem, params, layers, k, options.quad_order);
        result.grid.clamped_entries += tl.clamp_count;
        if (k == 1)
            row = tl.weights.row(0);
        else
            row = row * tl.weights;
    }
    result.q = (row * payoff_vector(problem, layers.back()))(0);

    if (!std::isfinite(result.q.real()) || !std::isfinite(result.q.imag()))
        throw std::runtime_error("price: propagation produced a non-finite value");

    result.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    return result;
}

ValueSurface value_surface(const Problem& problem, const SchemeParams& params,
                           const PricingOptions& options) {
    const std::vector<LatticeLayer> layers =
        build_layers(problem.model.x0, problem.bounds, params);

    ValueSurface surface;
    surface.layers.resize(layers.size());

    Eigen::VectorXcd v = payoff_vector(problem, layers.back());
    surface.layers[params.n] = {params.n, layers[params.n].t,
                                layers[params.n].nodes, v};
    for (int k = params.n - 1; k >= 0; --k) {
        const TransitionLayer tl =
            assemble_layer(problem, params, layers, k + 1, options.quad_order);
        v = tl.weights * v;
        surface.layers[k] = {k, layers[k].t, layers[k].nodes, v};
    }
    return surface;
}

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares_line: need >= 2 points");
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0)
        throw std::invalid_argument("least_squares_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss_res = 0;
    const double mean_y = sy / m;
    double ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

ConvergenceResult convergence_study(const Problem& problem,
                                    const SchemeParams& base,
                                    const std::vector<int>& n_list,
                                    const PricingOptions& options) {
    if (n_list.size() < 2)
        throw std::invalid_argument("convergence_study: need at least 2 n values");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("convergence_study: n_list must increase");

    const int count = static_cast<int>(n_list.size());
    std::vector<Complex> q_at(2 * count);
    std::exception_ptr failure;

    // Distinct n are independent; price() is sequential inside an active
    // parallel region, so this is the only parallel level that fires here.
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < 2 * count; ++idx) {
        try {
            SchemeParams p = base;
            p.n = n_list[idx / 2] + (idx % 2);
            q_at[idx] = price(problem, p, options).q;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    ConvergenceResult result;
    result.points.reserve(count);
    std::vector<double> log_n, log_diff;
    double max_diff = 0.0;
    for (int i = 0; i < count; ++i) {
        ConvergencePoint pt;
        pt.n = n_list[i];
        pt.q_n = q_at[2 * i];
        pt.q_next = q_at[2 * i + 1];
        pt.diff_abs = std::abs(pt.q_next.real() - pt.q_n.real());
        max_diff = std::max(max_diff, pt.diff_abs);
        result.points.push_back(pt);
    }

    // Differences at rounding-noise level carry no rate information.
    result.degenerate = max_diff < 1e-10;
    for (const ConvergencePoint& pt : result.points)
        if (pt.diff_abs <= 0.0) result.degenerate = true;

    if (!result.degenerate) {
        for (const ConvergencePoint& pt : result.points) {
            log_n.push_back(std::log(static_cast<double>(pt.n)));
            log_diff.push_back(std::log(pt.diff_abs));
        }
        result.fit = least_squares_line(log_n, log_diff);
    }
    return result;
}

std::vector<int> default_n_list() { return {16, 24, 32, 48, 64, 96, 128}; }

Problem hull_white_problem(double alpha, double sigma, ExprPtr forward_curve,
                           const BoundaryPair& rate_bounds,
                           std::optional<double> r0) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("hull_white_problem: alpha and sigma must be positive");
    if (references(*forward_curve, 'x') || contains_imag(*forward_curve))
        throw std::invalid_argument(
            "hull_white_problem: forward curve must be a real function of t");

    // f, f', f'' from one doubly seeded hyper-dual evaluation.
    auto curve = [forward_curve](double t) {
        Bindings<HyperDual> b;
        b.t = HyperDual::variable(t);
        return eval(*forward_curve, b);
    };

    auto theta = [curve, alpha, sigma](double t) {
        const HyperDual f = curve(t);
        return f.d1 + alpha * f.v +
               sigma * sigma / (2.0 * alpha) * (1.0 - std::exp(-2.0 * alpha * t));
    };

    DiffusionModel model;
    model.x0 = (r0 ? *r0 : curve(0.0).v) / sigma;
    model.drift = [theta, alpha, sigma](double t, double x) {
        return (theta(t) - alpha * sigma * x) / sigma;
    };
    model.drift_dt = [curve, alpha, sigma](double t, double) {
        const HyperDual f = curve(t);
        const double theta_dt =
            f.d12 + alpha * f.d1 + sigma * sigma * std::exp(-2.0 * alpha * t);
        return theta_dt / sigma;
    };
    model.drift_dx = [alpha](double, double) { return -alpha; };
    model.drift_dxx = [](double, double) { return 0.0; };

    BoundaryPair scaled;
    scaled.lower = [lo = rate_bounds.lower, sigma](double t) { return lo(t) / sigma; };
    scaled.upper = [hi = rate_bounds.upper, sigma](double t) { return hi(t) / sigma; };

    Problem problem;
    problem.model = std::move(model);
    problem.bounds = std::move(scaled);
    problem.potential =
        Potential::smooth([sigma](double x) { return Complex(sigma * x, 0.0); });
    problem.payoff = Payoff::one();
    return problem;
}

}  // namespace fklattice
