#pragma once

#include <cstdint>

#include "fklattice/model.hpp"

namespace fklattice {

/// Monte Carlo estimate of the killed-diffusion expectation.
struct McEstimate {
    Complex mean;
    double se_re = 0.0;  ///< standard error of the real component
    double se_im = 0.0;  ///< standard error of the imaginary component
    long paths = 0;
    int steps_per_path = 0;
    std::uint64_t seed = 0;
};

/// Euler paths with per-step Brownian-bridge survival weights against both
/// boundaries; a path is killed outright when a grid point leaves the strip.
/// Smooth killing rates are integrated by the trapezoidal rule along the
/// path; a step potential accumulates the expected sojourn time above the
/// level per step instead. Fixing the seed reproduces the estimate
/// bit-for-bit on one platform regardless of thread count.
McEstimate mc_price(const Problem& problem, int m_steps, long paths,
                    std::uint64_t seed, int quad_order = 8);

}  // namespace fklattice
