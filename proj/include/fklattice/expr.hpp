#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fklattice/hyperdual.hpp"

namespace fklattice {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Exp, Log, Sin, Cos, Sqrt, Abs, Min, Max, Step };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Arithmetic expression over the variables `t` and `x`, the imaginary
/// literal `i`, and the builtins exp, log, sin, cos, sqrt, abs, min, max,
/// step(x, r).  Precedence: ^  >  unary-  >  * /  >  + -, with ^
/// right-associative.
struct Expr {
    struct Num { double value; };
    struct Imag {};
    struct Var { char name; };  // 't' or 'x'
    struct Neg { ExprPtr arg; };
    struct Bin { BinOp op; ExprPtr lhs; ExprPtr rhs; };
    struct Call { Func fn; std::vector<ExprPtr> args; };

    std::variant<Num, Imag, Var, Neg, Bin, Call> node;
};

ExprPtr make_num(double v);
ExprPtr make_var(char name);
ExprPtr make_neg(ExprPtr e);
ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr make_call(Func fn, std::vector<ExprPtr> args);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Parse failure with the byte offset it occurred at.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t offset, const std::string& expected)
        : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                             ": expected " + expected),
          offset_(offset), expected_(expected) {}
    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class UnknownIdentifier : public std::runtime_error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name)
        : std::runtime_error("unknown identifier '" + name + "' at offset " +
                             std::to_string(offset)),
          offset_(offset), name_(name) {}
    std::size_t offset() const { return offset_; }
    const std::string& name() const { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundVariable : public EvalError {
public:
    explicit UnboundVariable(char name)
        : EvalError(std::string("unbound variable '") + name + "'") {}
};

class EvalDomainError : public EvalError {
public:
    using EvalError::EvalError;
};

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

/// Parse source text into an AST. Throws SyntaxError / UnknownIdentifier.
ExprPtr parse(std::string_view src);

/// Minimal-parenthesis rendering; parse(to_string(e)) is structurally
/// identical to e.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// True if the expression references the given variable.
bool references(const Expr& e, char var);

/// True if the expression contains the imaginary literal.
bool contains_imag(const Expr& e);

/// Value of a variable-free real expression, or nullopt if it has variables,
/// an imaginary part, or fails to evaluate.
std::optional<double> fold_real_constant(const Expr& e);

// ---------------------------------------------------------------------------
// Evaluation, generic over the scalar type
// ---------------------------------------------------------------------------

template <class S>
struct Bindings {
    std::optional<S> t;
    std::optional<S> x;
};

namespace detail {

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static double from_double(double v) { return v; }
    static double imag_unit() {
        throw EvalDomainError("imaginary unit in real-valued expression");
    }
    static double value(double v) { return v; }
    static double div(double a, double b) {
        if (b == 0.0) throw EvalDomainError("division by zero");
        return a / b;
    }
    static double exp(double v) { return std::exp(v); }
    static double log(double v) {
        if (v <= 0.0) throw EvalDomainError("log of nonpositive value");
        return std::log(v);
    }
    static double sin(double v) { return std::sin(v); }
    static double cos(double v) { return std::cos(v); }
    static double sqrt(double v) {
        if (v < 0.0) throw EvalDomainError("sqrt of negative value");
        return std::sqrt(v);
    }
    static double abs(double v) { return std::abs(v); }
    static double pow_const(double b, double p) {
        if (b < 0.0 && p != std::floor(p))
            throw EvalDomainError("fractional power of negative base");
        if (b == 0.0 && p < 0.0)
            throw EvalDomainError("negative power of zero");
        return std::pow(b, p);
    }
    static double pow(double b, double p) { return pow_const(b, p); }
};

template <>
struct ScalarOps<Complex> {
    static Complex from_double(double v) { return {v, 0.0}; }
    static Complex imag_unit() { return {0.0, 1.0}; }
    static double value(const Complex& v) { return v.real(); }
    static Complex div(const Complex& a, const Complex& b) {
        if (b == Complex(0.0, 0.0)) throw EvalDomainError("division by zero");
        return a / b;
    }
    static Complex exp(const Complex& v) { return std::exp(v); }
    static Complex log(const Complex& v) {
        if (v == Complex(0.0, 0.0)) throw EvalDomainError("log of zero");
        return std::log(v);
    }
    static Complex sin(const Complex& v) { return std::sin(v); }
    static Complex cos(const Complex& v) { return std::cos(v); }
    static Complex sqrt(const Complex& v) { return std::sqrt(v); }
    static Complex abs(const Complex& v) { return {std::abs(v), 0.0}; }
    static Complex pow_const(const Complex& b, double p) {
        if (b == Complex(0.0, 0.0) && p < 0.0)
            throw EvalDomainError("negative power of zero");
        return std::pow(b, p);
    }
    static Complex pow(const Complex& b, const Complex& p) {
        return std::pow(b, p);
    }
};

template <>
struct ScalarOps<HyperDual> {
    static HyperDual from_double(double v) { return HyperDual::constant(v); }
    static HyperDual imag_unit() {
        throw EvalDomainError("imaginary unit in differentiable expression");
    }
    static double value(const HyperDual& v) { return v.v; }
    static HyperDual div(const HyperDual& a, const HyperDual& b) { return a / b; }
    static HyperDual exp(const HyperDual& v) { return fklattice::exp(v); }
    static HyperDual log(const HyperDual& v) { return fklattice::log(v); }
    static HyperDual sin(const HyperDual& v) { return fklattice::sin(v); }
    static HyperDual cos(const HyperDual& v) { return fklattice::cos(v); }
    static HyperDual sqrt(const HyperDual& v) { return fklattice::sqrt(v); }
    static HyperDual abs(const HyperDual& v) { return fklattice::abs(v); }
    static HyperDual pow_const(const HyperDual& b, double p) {
        return fklattice::pow(b, p);
    }
    static HyperDual pow(const HyperDual& b, const HyperDual& p) {
        return fklattice::exp(p * fklattice::log(b));
    }
};

// Exponentiation by squaring; exact for polynomial expressions.
template <class S>
S ipow(S base, long long p) {
    using Ops = ScalarOps<S>;
    if (p < 0) return Ops::div(Ops::from_double(1.0), ipow(base, -p));
    S acc = Ops::from_double(1.0);
    while (p > 0) {
        if (p & 1) acc = acc * base;
        base = base * base;
        p >>= 1;
    }
    return acc;
}

}  // namespace detail

template <class S>
S eval(const Expr& e, const Bindings<S>& b) {
    using Ops = detail::ScalarOps<S>;
    return std::visit(
        [&](const auto& node) -> S {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Num>) {
                return Ops::from_double(node.value);
            } else if constexpr (std::is_same_v<T, Expr::Imag>) {
                return Ops::imag_unit();
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                const std::optional<S>& bound = node.name == 't' ? b.t : b.x;
                if (!bound) throw UnboundVariable(node.name);
                return *bound;
            } else if constexpr (std::is_same_v<T, Expr::Neg>) {
                return -eval(*node.arg, b);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                if (node.op == BinOp::Pow) {
                    // Literal integer exponents use repeated multiplication,
                    // which is exact and valid for negative bases.
                    if (auto p = fold_real_constant(*node.rhs)) {
                        const S base = eval(*node.lhs, b);
                        if (*p == std::floor(*p) && std::abs(*p) < 1e15)
                            return detail::ipow(base, static_cast<long long>(*p));
                        return Ops::pow_const(base, *p);
                    }
                    return Ops::pow(eval(*node.lhs, b), eval(*node.rhs, b));
                }
                const S l = eval(*node.lhs, b);
                const S r = eval(*node.rhs, b);
                switch (node.op) {
                    case BinOp::Add: return l + r;
                    case BinOp::Sub: return l - r;
                    case BinOp::Mul: return l * r;
                    case BinOp::Div: return Ops::div(l, r);
                    default: break;
                }
                throw EvalError("unreachable binary operator");
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                switch (node.fn) {
                    case Func::Exp: return Ops::exp(eval(*node.args[0], b));
                    case Func::Log: return Ops::log(eval(*node.args[0], b));
                    case Func::Sin: return Ops::sin(eval(*node.args[0], b));
                    case Func::Cos: return Ops::cos(eval(*node.args[0], b));
                    case Func::Sqrt: return Ops::sqrt(eval(*node.args[0], b));
                    case Func::Abs: return Ops::abs(eval(*node.args[0], b));
                    case Func::Min: {
                        S a = eval(*node.args[0], b);
                        S c = eval(*node.args[1], b);
                        return Ops::value(a) <= Ops::value(c) ? a : c;
                    }
                    case Func::Max: {
                        S a = eval(*node.args[0], b);
                        S c = eval(*node.args[1], b);
                        return Ops::value(a) >= Ops::value(c) ? a : c;
                    }
                    case Func::Step: {
                        // step(x, r) = 1{x > r}; strict at the level.
                        S a = eval(*node.args[0], b);
                        S c = eval(*node.args[1], b);
                        return Ops::from_double(
                            Ops::value(a) > Ops::value(c) ? 1.0 : 0.0);
                    }
                }
                throw EvalError("unreachable call");
            }
        },
        e.node);
}

/// Evaluate an expression that must be real-valued: runs over complex
/// arithmetic and rejects an imaginary residual above 1e-14 (relative).
double eval_real(const Expr& e, std::optional<double> t, std::optional<double> x);

Complex eval_complex(const Expr& e, std::optional<double> t, std::optional<double> x);

/// Drift value and partials from two hyper-dual evaluations: one seeded in
/// t (first direction), one seeded doubly in x.
struct DriftPartials {
    double value;
    double dt;
    double dx;
    double dxx;
};

DriftPartials drift_partials(const Expr& e, double t, double x);

}  // namespace fklattice
