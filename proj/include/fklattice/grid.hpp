#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fklattice/model.hpp"

namespace fklattice {

/// Thrown when a floor denominator in the lattice-step formula vanishes,
/// i.e. n is too small for the requested gamma and strip width.
class GridTooCoarse : public std::runtime_error {
public:
    GridTooCoarse(int k, const std::string& what)
        : std::runtime_error(what), k_(k) {}
    int k() const { return k_; }

private:
    int k_;
};

/// Space lattice at one time level. Both boundary values lie exactly on the
/// unrestricted lattice; `nodes` holds the strictly interior points
/// g_hi - j*h, j = 1..intervals-1, in descending order. Layer 0 is the
/// singleton {x0} with h = 0.
struct LatticeLayer {
    int k = 0;
    double t = 0.0;
    double h = 0.0;
    double g_lo = 0.0;
    double g_hi = 0.0;
    long intervals = 0;  // (g_hi - g_lo) / h
    std::vector<double> nodes;

    long node_count() const { return static_cast<long>(nodes.size()); }
};

/// Width multiplier w and lattice step h at level k (1 <= k <= n). The step
/// divides the strip width into an integer number of intervals; level n uses
/// the finer dt-scale resolution. Throws GridTooCoarse.
std::pair<double, double> layer_step(const BoundaryPair& bounds,
                                     const SchemeParams& params, int k);

/// All layers k = 0..n for the given initial state and boundaries.
std::vector<LatticeLayer> build_layers(double x0, const BoundaryPair& bounds,
                                       const SchemeParams& params);

}  // namespace fklattice
