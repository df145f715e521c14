#pragma once

#include <cmath>
#include <stdexcept>

namespace fklattice {

/// Four-component truncated Taylor number. Arithmetic on HyperDual carries
/// exact first and second derivatives through a computation: seed an input
/// with variable() and read f' from d1 and f'' from d12 of the result.
/// Two independent seed directions (d1 for t, d2 unused / both for x)
/// also give mixed partials, though this project only needs d/dt and
/// d2/dx2 of the drift.
struct HyperDual {
    double v   = 0.0;  ///< function value
    double d1  = 0.0;  ///< first-direction derivative
    double d2  = 0.0;  ///< second-direction derivative
    double d12 = 0.0;  ///< mixed / second derivative

    constexpr HyperDual() = default;
    constexpr HyperDual(double value) : v(value) {}
    constexpr HyperDual(double value, double e1, double e2, double e12)
        : v(value), d1(e1), d2(e2), d12(e12) {}

    /// Seed for a single variable: f(variable(x)) has f'(x) in d1 and
    /// f''(x) in d12.
    static constexpr HyperDual variable(double x) { return {x, 1.0, 1.0, 0.0}; }

    /// Seed carrying a derivative in the first direction only.
    static constexpr HyperDual direction1(double x) { return {x, 1.0, 0.0, 0.0}; }

    static constexpr HyperDual constant(double x) { return {x, 0.0, 0.0, 0.0}; }

    constexpr HyperDual operator-() const { return {-v, -d1, -d2, -d12}; }

    constexpr HyperDual& operator+=(const HyperDual& o) {
        v += o.v; d1 += o.d1; d2 += o.d2; d12 += o.d12;
        return *this;
    }
    constexpr HyperDual& operator-=(const HyperDual& o) {
        v -= o.v; d1 -= o.d1; d2 -= o.d2; d12 -= o.d12;
        return *this;
    }
    constexpr HyperDual& operator*=(const HyperDual& o) {
        // Leibniz rule through all slots; d12 picks up the cross term.
        const double nv   = v * o.v;
        const double nd1  = v * o.d1 + d1 * o.v;
        const double nd2  = v * o.d2 + d2 * o.v;
        const double nd12 = v * o.d12 + d1 * o.d2 + d2 * o.d1 + d12 * o.v;
        v = nv; d1 = nd1; d2 = nd2; d12 = nd12;
        return *this;
    }

    constexpr bool operator==(const HyperDual&) const = default;
};

constexpr HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
constexpr HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
constexpr HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }

/// Composition with a scalar function given f(v), f'(v), f''(v).
constexpr HyperDual chain(double f, double fp, double fpp, const HyperDual& x) {
    return {f, fp * x.d1, fp * x.d2, fp * x.d12 + fpp * x.d1 * x.d2};
}

inline HyperDual reciprocal(const HyperDual& x) {
    if (x.v == 0.0)
        throw std::domain_error("hyperdual: division by zero");
    const double inv = 1.0 / x.v;
    return chain(inv, -inv * inv, 2.0 * inv * inv * inv, x);
}

inline HyperDual operator/(const HyperDual& a, const HyperDual& b) {
    return a * reciprocal(b);
}

inline HyperDual exp(const HyperDual& x) {
    const double e = std::exp(x.v);
    return chain(e, e, e, x);
}

inline HyperDual log(const HyperDual& x) {
    if (x.v <= 0.0)
        throw std::domain_error("hyperdual: log of nonpositive value");
    const double inv = 1.0 / x.v;
    return chain(std::log(x.v), inv, -inv * inv, x);
}

inline HyperDual sin(const HyperDual& x) {
    return chain(std::sin(x.v), std::cos(x.v), -std::sin(x.v), x);
}

inline HyperDual cos(const HyperDual& x) {
    return chain(std::cos(x.v), -std::sin(x.v), -std::cos(x.v), x);
}

inline HyperDual sqrt(const HyperDual& x) {
    if (x.v <= 0.0)
        throw std::domain_error("hyperdual: sqrt of nonpositive value");
    const double r = std::sqrt(x.v);
    return chain(r, 0.5 / r, -0.25 / (r * x.v), x);
}

/// x^p for constant real exponent. Integer exponents are handled by the
/// expression evaluator via repeated multiplication; this path requires a
/// positive base whenever the derivative terms need fractional powers.
inline HyperDual pow(const HyperDual& x, double p) {
    if (x.v <= 0.0 && p != std::floor(p))
        throw std::domain_error("hyperdual: fractional power of nonpositive base");
    const double f = std::pow(x.v, p);
    const double fp = p * std::pow(x.v, p - 1.0);
    const double fpp = p * (p - 1.0) * std::pow(x.v, p - 2.0);
    return chain(f, fp, fpp, x);
}

inline HyperDual abs(const HyperDual& x) {
    // Derivative of |x| away from 0; at 0 we pick the subgradient 0.
    const double s = x.v > 0.0 ? 1.0 : (x.v < 0.0 ? -1.0 : 0.0);
    return {std::abs(x.v), s * x.d1, s * x.d2, s * x.d12};
}

}  // namespace fklattice
