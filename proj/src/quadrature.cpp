#include "fklattice/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace fklattice {

namespace {

// Nodes are the roots of the Legendre polynomial P_m, found by Newton
// iteration from the Chebyshev-like initial guess; weights follow from the
// derivative at the root.
GaussLegendre compute_rule(int m) {
    if (m < 1)
        throw std::invalid_argument("gauss_legendre: order must be positive");
    GaussLegendre rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Recurrence for P_m(x) and derivative.
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) {
        rule.nodes[m / 2] = 0.0;
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

}  // namespace fklattice
