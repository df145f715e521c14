#pragma once

#include <cmath>
#include <vector>

namespace fklattice {

/// Gauss–Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule of the given order, computed once and cached. Thread-safe.
const GaussLegendre& gauss_legendre(int order);

/// Standard normal distribution function.
inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

/// Upper tail of the standard normal distribution, accurate for large z.
inline double norm_ccdf(double z) {
    return 0.5 * std::erfc(z * M_SQRT1_2);
}

}  // namespace fklattice
