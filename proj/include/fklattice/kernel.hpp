#pragma once

#include <Eigen/Dense>

#include "fklattice/grid.hpp"
#include "fklattice/model.hpp"

namespace fklattice {

/// Discrete one-step drift and variance at a source node.
struct StepMoments {
    double mean_shift;  ///< added to x to centre the transition density
    double variance;
};

/// Corrected pseudo-transition weights from layer k-1 to layer k.
struct TransitionLayer {
    int k = 0;
    Eigen::MatrixXcd weights;  ///< node_count(k-1) x node_count(k)
    long clamp_count = 0;      ///< negative bridge weights clamped to zero

    long rows() const { return weights.rows(); }
    long cols() const { return weights.cols(); }
};

/// One-step moments of the chain leaving x at time t_{n,k-1}. The drift
/// enters through a half-step Taylor correction; the variance picks up the
/// matching first-order volatility adjustment.
StepMoments moments(const DiffusionModel& model, const SchemeParams& params,
                    int k, double x);

/// Gaussian density at y, centred at x + mean_shift, times the destination
/// lattice step. Row sums over the unrestricted lattice are within
/// O(dt^{1+2*delta}) of one and are deliberately not normalised.
double pseudo_prob(double x, double y, const StepMoments& m, double h);

/// Survival weight of the linear bridge from (t_{k-1}, x) to (t_k, y)
/// against both boundaries; may be slightly negative near opposite
/// boundaries at coarse n.
double bridge_survival_raw(double x, double y, const LatticeLayer& from,
                           const LatticeLayer& to, int n);

/// bridge_survival_raw clamped to [0, 1): a crossing certainty never turns
/// into a negative weight.
double bridge_factor(double x, double y, const LatticeLayer& from,
                     const LatticeLayer& to, int n);

/// Trapezoidal weight exp{-dt/2 (V(x) + V(y))} for a smooth killing rate.
Complex potential_factor_smooth(const Potential& potential,
                                const SchemeParams& params, double x, double y);

/// Expected time the Brownian bridge from (0, x) to (t, y) spends above
/// `level`, via Gauss-Legendre quadrature of the crossing probability.
/// Saturates exactly to 0 or t when the segment stays far from the level.
double expected_sojourn_above(double level, double t, double x, double y,
                              int quad_order);

/// Sojourn-time weight 1 - kappa * E[time above `level` of the bridge from
/// x to y over one step], with the expectation integral evaluated by
/// Gauss-Legendre quadrature of the given order. Replaces the trapezoidal
/// weight when V is a step function, whose discontinuity otherwise ruins
/// the convergence order.
double potential_factor_step(double kappa, double level,
                             const SchemeParams& params, double x, double y,
                             int quad_order);

/// Dense matrix of pseudo_prob * bridge_factor * potential factor over the
/// interior nodes of layers k-1 and k. Entries are independent; the fill is
/// parallel across rows.
TransitionLayer assemble_layer(const Problem& problem, const SchemeParams& params,
                               const std::vector<LatticeLayer>& layers, int k,
                               int quad_order = 16);

}  // namespace fklattice
