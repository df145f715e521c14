#include "fklattice/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace fklattice {

ExprPtr make_num(double v) { return std::make_shared<Expr>(Expr{Expr::Num{v}}); }
ExprPtr make_var(char name) { return std::make_shared<Expr>(Expr{Expr::Var{name}}); }
ExprPtr make_neg(ExprPtr e) { return std::make_shared<Expr>(Expr{Expr::Neg{std::move(e)}}); }
ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Expr{Expr::Bin{op, std::move(l), std::move(r)}});
}
ExprPtr make_call(Func fn, std::vector<ExprPtr> args) {
    return std::make_shared<Expr>(Expr{Expr::Call{fn, std::move(args)}});
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum Kind {
        Number, Ident, Plus, Minus, Star, Slash, Caret,
        LParen, RParen, Comma, End
    } kind;
    double num = 0.0;
    std::string text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::End;
            return;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': tok_.kind = Token::Plus; ++pos_; return;
            case '-': tok_.kind = Token::Minus; ++pos_; return;
            case '*': tok_.kind = Token::Star; ++pos_; return;
            case '/': tok_.kind = Token::Slash; ++pos_; return;
            case '^': tok_.kind = Token::Caret; ++pos_; return;
            case '(': tok_.kind = Token::LParen; ++pos_; return;
            case ')': tok_.kind = Token::RParen; ++pos_; return;
            case ',': tok_.kind = Token::Comma; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
                ++end;
            tok_.kind = Token::Ident;
            tok_.text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
            return;
        }
        throw SyntaxError(pos_, "a token");
    }

    void lex_number() {
        std::size_t end = pos_;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end])))
            ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end])))
                ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp = end + 1;
            if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-'))
                ++exp;
            if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
                ++exp;
                while (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp])))
                    ++exp;
                end = exp;
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + pos_, src_.data() + end, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + end)
            throw SyntaxError(pos_, "a numeric literal");
        tok_.kind = Token::Number;
        tok_.num = value;
        pos_ = end;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_;
};

// ---------------------------------------------------------------------------
// Parser: expression := additive; additive := multiplicative (('+'|'-') ...)*;
// multiplicative := unary (('*'|'/') unary)*; unary := '-' unary | power;
// power := atom ('^' unary)?   (right-associative)
// ---------------------------------------------------------------------------

struct FuncSpec {
    std::string_view name;
    Func fn;
    int arity;
};

constexpr std::array<FuncSpec, 9> kFuncs{{
    {"exp", Func::Exp, 1}, {"log", Func::Log, 1}, {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1}, {"sqrt", Func::Sqrt, 1}, {"abs", Func::Abs, 1},
    {"min", Func::Min, 2}, {"max", Func::Max, 2}, {"step", Func::Step, 2},
}};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    ExprPtr parse_all() {
        ExprPtr e = additive();
        if (lex_.peek().kind != Token::End)
            throw SyntaxError(lex_.peek().offset, "end of input or an operator");
        return e;
    }

private:
    ExprPtr additive() {
        ExprPtr e = multiplicative();
        for (;;) {
            const Token::Kind k = lex_.peek().kind;
            if (k != Token::Plus && k != Token::Minus) return e;
            lex_.take();
            e = make_bin(k == Token::Plus ? BinOp::Add : BinOp::Sub, e, multiplicative());
        }
    }

    ExprPtr multiplicative() {
        ExprPtr e = unary();
        for (;;) {
            const Token::Kind k = lex_.peek().kind;
            if (k != Token::Star && k != Token::Slash) return e;
            lex_.take();
            e = make_bin(k == Token::Star ? BinOp::Mul : BinOp::Div, e, unary());
        }
    }

    ExprPtr unary() {
        if (lex_.peek().kind == Token::Minus) {
            lex_.take();
            return make_neg(unary());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (lex_.peek().kind == Token::Caret) {
            lex_.take();
            return make_bin(BinOp::Pow, base, unary());
        }
        return base;
    }

    ExprPtr atom() {
        const Token tok = lex_.take();
        switch (tok.kind) {
            case Token::Number:
                return make_num(tok.num);
            case Token::LParen: {
                ExprPtr e = additive();
                expect(Token::RParen, "')'");
                return e;
            }
            case Token::Ident: {
                if (tok.text == "t" || tok.text == "x")
                    return make_var(tok.text[0]);
                if (tok.text == "i")
                    return std::make_shared<Expr>(Expr{Expr::Imag{}});
                for (const FuncSpec& f : kFuncs) {
                    if (tok.text == f.name)
                        return call(f);
                }
                throw UnknownIdentifier(tok.offset, tok.text);
            }
            default:
                throw SyntaxError(tok.offset, "a number, variable, function, or '('");
        }
    }

    ExprPtr call(const FuncSpec& f) {
        expect(Token::LParen, "'('");
        std::vector<ExprPtr> args;
        args.push_back(additive());
        for (int i = 1; i < f.arity; ++i) {
            expect(Token::Comma, "','");
            args.push_back(additive());
        }
        expect(Token::RParen, "')'");
        return make_call(f.fn, std::move(args));
    }

    void expect(Token::Kind kind, const std::string& what) {
        if (lex_.peek().kind != kind)
            throw SyntaxError(lex_.peek().offset, what);
        lex_.take();
    }

    Lexer lex_;
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

enum Prec { PrecAdd = 1, PrecMul = 2, PrecNeg = 3, PrecPow = 4, PrecAtom = 5 };

int precedence(const Expr& e) {
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Neg>) {
                return PrecNeg;
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                switch (node.op) {
                    case BinOp::Add:
                    case BinOp::Sub: return PrecAdd;
                    case BinOp::Mul:
                    case BinOp::Div: return PrecMul;
                    case BinOp::Pow: return PrecPow;
                }
                return PrecAtom;
            } else {
                return PrecAtom;
            }
        },
        e.node);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print(child, out);
        out += ')';
    } else {
        print(child, out);
    }
}

void print(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Num>) {
                out += format_number(node.value);
            } else if constexpr (std::is_same_v<T, Expr::Imag>) {
                out += 'i';
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, Expr::Neg>) {
                out += '-';
                print_child(*node.arg, PrecNeg, out);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                switch (node.op) {
                    case BinOp::Add:
                        print_child(*node.lhs, PrecAdd, out);
                        out += " + ";
                        print_child(*node.rhs, PrecMul, out);
                        break;
                    case BinOp::Sub:
                        print_child(*node.lhs, PrecAdd, out);
                        out += " - ";
                        print_child(*node.rhs, PrecMul, out);
                        break;
                    case BinOp::Mul:
                        print_child(*node.lhs, PrecMul, out);
                        out += '*';
                        print_child(*node.rhs, PrecNeg, out);
                        break;
                    case BinOp::Div:
                        print_child(*node.lhs, PrecMul, out);
                        out += '/';
                        print_child(*node.rhs, PrecNeg, out);
                        break;
                    case BinOp::Pow:
                        // Left operand binds tighter than '^' itself; the
                        // right operand may be a unary chain (right-assoc).
                        print_child(*node.lhs, PrecAtom, out);
                        out += '^';
                        print_child(*node.rhs, PrecNeg, out);
                        break;
                }
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                switch (node.fn) {
                    case Func::Exp: out += "exp"; break;
                    case Func::Log: out += "log"; break;
                    case Func::Sin: out += "sin"; break;
                    case Func::Cos: out += "cos"; break;
                    case Func::Sqrt: out += "sqrt"; break;
                    case Func::Abs: out += "abs"; break;
                    case Func::Min: out += "min"; break;
                    case Func::Max: out += "max"; break;
                    case Func::Step: out += "step"; break;
                }
                out += '(';
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    if (i) out += ", ";
                    print(*node.args[i], out);
                }
                out += ')';
            }
        },
        e.node);
}

}  // namespace

ExprPtr parse(std::string_view src) { return Parser(src).parse_all(); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Expr::Num>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, Expr::Imag>) {
                return true;
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, Expr::Neg>) {
                return structurally_equal(*na.arg, *nb.arg);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                return na.op == nb.op && structurally_equal(*na.lhs, *nb.lhs) &&
                       structurally_equal(*na.rhs, *nb.rhs);
            } else {
                static_assert(std::is_same_v<T, Expr::Call>);
                if (na.fn != nb.fn || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!structurally_equal(*na.args[i], *nb.args[i])) return false;
                return true;
            }
        },
        a.node);
}

bool references(const Expr& e, char var) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Var>) {
                return node.name == var;
            } else if constexpr (std::is_same_v<T, Expr::Neg>) {
                return references(*node.arg, var);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                return references(*node.lhs, var) || references(*node.rhs, var);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                for (const ExprPtr& a : node.args)
                    if (references(*a, var)) return true;
                return false;
            } else {
                return false;
            }
        },
        e.node);
}

bool contains_imag(const Expr& e) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Imag>) {
                return true;
            } else if constexpr (std::is_same_v<T, Expr::Neg>) {
                return contains_imag(*node.arg);
            } else if constexpr (std::is_same_v<T, Expr::Bin>) {
                return contains_imag(*node.lhs) || contains_imag(*node.rhs);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                for (const ExprPtr& a : node.args)
                    if (contains_imag(*a)) return true;
                return false;
            } else {
                return false;
            }
        },
        e.node);
}

std::optional<double> fold_real_constant(const Expr& e) {
    if (references(e, 't') || references(e, 'x') || contains_imag(e))
        return std::nullopt;
    try {
        return eval<double>(e, {});
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

double eval_real(const Expr& e, std::optional<double> t, std::optional<double> x) {
    Bindings<Complex> b;
    if (t) b.t = Complex(*t, 0.0);
    if (x) b.x = Complex(*x, 0.0);
    const Complex v = eval(e, b);
    if (std::abs(v.imag()) > 1e-14 * std::max(1.0, std::abs(v.real())))
        throw EvalDomainError("expression has a nonzero imaginary part");
    return v.real();
}

Complex eval_complex(const Expr& e, std::optional<double> t, std::optional<double> x) {
    Bindings<Complex> b;
    if (t) b.t = Complex(*t, 0.0);
    if (x) b.x = Complex(*x, 0.0);
    return eval(e, b);
}

DriftPartials drift_partials(const Expr& e, double t, double x) {
    Bindings<HyperDual> in_t;
    in_t.t = HyperDual::direction1(t);
    in_t.x = HyperDual::constant(x);
    const HyperDual a = eval(e, in_t);

    Bindings<HyperDual> in_x;
    in_x.t = HyperDual::constant(t);
    in_x.x = HyperDual::variable(x);
    const HyperDual c = eval(e, in_x);

    return {a.v, a.d1, c.d1, c.d12};
}

}  // namespace fklattice
