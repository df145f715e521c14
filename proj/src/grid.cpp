#include "fklattice/grid.hpp"

#include <cassert>
#include <cmath>

namespace fklattice {

namespace {

struct StepParts {
    double width;
    double w;
    double h;
    long intervals;
};

StepParts step_parts(const BoundaryPair& bounds, const SchemeParams& params, int k) {
    const int n = params.n;
    if (k < 1 || k > n)
        throw std::invalid_argument("layer_step: k must lie in 1..n");
    const double dt = 1.0 / n;
    const double t = static_cast<double>(k) / n;
    const double width = bounds.upper(t) - bounds.lower(t);
    if (!(width > 0.0))
        throw std::invalid_argument("layer_step: strip width nonpositive at k=" +
                                    std::to_string(k));
    const double scale = k < n ? std::pow(dt, 0.5 + params.delta) : dt;
    const double ratio = width / scale;
    const double floored = std::floor(params.gamma * ratio);
    if (floored < 1.0)
        throw GridTooCoarse(k, "grid too coarse: floor(gamma*width/dt^a) = 0 at k=" +
                                   std::to_string(k));
    const long intervals = static_cast<long>(floored);
    // h = w * scale collapses to width / intervals; dividing directly keeps
    // intervals * h equal to the strip width to the last ulp, which puts both
    // boundary values exactly on the lattice.
    const double w = ratio / floored;
    const double h = width / floored;
    assert(std::abs(std::round(width / h) - width / h) < 1e-6);
    return {width, w, h, intervals};
}

}  // namespace

std::pair<double, double> layer_step(const BoundaryPair& bounds,
                                     const SchemeParams& params, int k) {
    const StepParts parts = step_parts(bounds, params, k);
    return {parts.w, parts.h};
}

std::vector<LatticeLayer> build_layers(double x0, const BoundaryPair& bounds,
                                       const SchemeParams& params) {
    const int n = params.n;
    std::vector<LatticeLayer> layers(n + 1);

    LatticeLayer& first = layers[0];
    first.k = 0;
    first.t = 0.0;
    first.h = 0.0;
    first.g_lo = bounds.lower(0.0);
    first.g_hi = bounds.upper(0.0);
    first.intervals = 0;
    first.nodes = {x0};

    for (int k = 1; k <= n; ++k) {
        const StepParts parts = step_parts(bounds, params, k);
        LatticeLayer& layer = layers[k];
        layer.k = k;
        layer.t = static_cast<double>(k) / n;
        layer.h = parts.h;
        layer.g_hi = bounds.upper(layer.t);
        layer.g_lo = bounds.lower(layer.t);
        layer.intervals = parts.intervals;
        // Strictly interior nodes by index; j = 0 and j = intervals are the
        // boundary points themselves and are excluded.
        layer.nodes.resize(parts.intervals - 1);
        for (long j = 1; j < parts.intervals; ++j)
            layer.nodes[j - 1] = layer.g_hi - static_cast<double>(j) * parts.h;
    }

    return layers;
}

}  // namespace fklattice
