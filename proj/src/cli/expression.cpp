#include "hjfield/cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace hjfield::cli {

ExpressionError::ExpressionError(const std::string& what, std::size_t offset)
    : ConfigError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

Bindings& Bindings::set(const std::string& name, Real value) {
    for (auto& [n, v] : values_) {
        if (n == name) {
            v = value;
            return *this;
        }
    }
    values_.emplace_back(name, value);
    return *this;
}

bool Bindings::has(const std::string& name) const {
    for (const auto& [n, v] : values_)
        if (n == name) return true;
    return name == "pi";
}

Real Bindings::get(const std::string& name) const {
    for (const auto& [n, v] : values_)
        if (n == name) return v;
    if (name == "pi") return std::numbers::pi;
    throw EvaluationError("identifier '" + name + "' has no value");
}

enum class Op { number, ident, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt };

struct Expression::Node {
    Op op = Op::number;
    Real value = 0.0;
    std::string name;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& src, const std::set<std::string>& ids) : s_(src), ids_(ids) {}

    NodePtr run() {
        skip();
        if (pos_ == s_.size()) throw ExpressionError("empty expression", pos_);
        NodePtr e = additive();
        skip();
        if (pos_ != s_.size()) throw ExpressionError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr additive() {
        NodePtr lhs = multiplicative();
        for (;;) {
            if (accept('+')) {
                lhs = make(Op::add, lhs, multiplicative());
            } else if (accept('-')) {
                lhs = make(Op::sub, lhs, multiplicative());
            } else {
                return lhs;
            }
        }
    }

    NodePtr multiplicative() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Op::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Op::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Op::pow, base, exponent());
        return base;
    }

    NodePtr exponent() {
        if (accept('-')) return make(Op::neg, exponent());
        return power();
    }

    NodePtr primary() {
        skip();
        if (pos_ == s_.size()) throw ExpressionError("unexpected end of expression", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = additive();
            if (!accept(')')) throw ExpressionError("expected ')'", pos_);
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return word();
        throw ExpressionError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t count = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw ExpressionError("malformed number", start);
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ExpressionError("malformed exponent", start);
        }
        Real v = 0.0;
        const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw ExpressionError("malformed number", start);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::number;
        n->value = v;
        return n;
    }

    NodePtr word() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') {
            Op op;
            if (name == "sin") {
                op = Op::sin;
            } else if (name == "cos") {
                op = Op::cos;
            } else if (name == "exp") {
                op = Op::exp;
            } else if (name == "sqrt") {
                op = Op::sqrt;
            } else {
                throw ExpressionError("unknown function '" + name + "'", start);
            }
            ++pos_;
            NodePtr arg = additive();
            if (!accept(')')) throw ExpressionError("expected ')'", pos_);
            return make(op, arg);
        }
        if (name != "pi" && !ids_.count(name)) throw ExpressionError("unknown identifier '" + name + "'", start);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::ident;
        n->name = name;
        return n;
    }

    const std::string& s_;
    const std::set<std::string>& ids_;
    std::size_t pos_ = 0;
};

Real eval_node(const Expression::Node& n, const Bindings& b) {
    switch (n.op) {
        case Op::number:
            return n.value;
        case Op::ident:
            return b.get(n.name);
        case Op::neg:
            return -eval_node(*n.a, b);
        case Op::add:
            return eval_node(*n.a, b) + eval_node(*n.b, b);
        case Op::sub:
            return eval_node(*n.a, b) - eval_node(*n.b, b);
        case Op::mul:
            return eval_node(*n.a, b) * eval_node(*n.b, b);
        case Op::div: {
            const Real d = eval_node(*n.b, b);
            if (d == 0.0) throw EvaluationError("division by zero");
            return eval_node(*n.a, b) / d;
        }
        case Op::pow: {
            const Real base = eval_node(*n.a, b);
            const Real ex = eval_node(*n.b, b);
            const Real v = std::pow(base, ex);
            if (std::isnan(v)) throw EvaluationError("power of a negative base with a non-integer exponent");
            return v;
        }
        case Op::sin:
            return std::sin(eval_node(*n.a, b));
        case Op::cos:
            return std::cos(eval_node(*n.a, b));
        case Op::exp:
            return std::exp(eval_node(*n.a, b));
        case Op::sqrt: {
            const Real v = eval_node(*n.a, b);
            if (v < 0) throw EvaluationError("sqrt of a negative number");
            return std::sqrt(v);
        }
    }
    throw EvaluationError("corrupt expression");
}

// Binding strength used by the printer: + - 1, * / 2, unary 3, ^ 4, atoms 5.
int strength(const Expression::Node& n) {
    switch (n.op) {
        case Op::add:
        case Op::sub:
            return 1;
        case Op::mul:
        case Op::div:
            return 2;
        case Op::neg:
            return 3;
        case Op::pow:
            return 4;
        default:
            return 5;
    }
}

std::string format_number(Real v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string print(const Expression::Node& n);

std::string wrap(const Expression::Node& n, bool parens) {
    return parens ? "(" + print(n) + ")" : print(n);
}

std::string print(const Expression::Node& n) {
    switch (n.op) {
        case Op::number:
            return format_number(n.value);
        case Op::ident:
            return n.name;
        case Op::neg:
            return "-" + wrap(*n.a, strength(*n.a) < 3);
        case Op::add:
        case Op::sub: {
            const char* sym = n.op == Op::add ? " + " : " - ";
            return wrap(*n.a, strength(*n.a) < 1) + sym + wrap(*n.b, strength(*n.b) <= 1);
        }
        case Op::mul:
        case Op::div: {
            const char* sym = n.op == Op::mul ? " * " : " / ";
            return wrap(*n.a, strength(*n.a) < 2) + sym + wrap(*n.b, strength(*n.b) <= 2);
        }
        case Op::pow:
            return wrap(*n.a, strength(*n.a) <= 4) + " ^ " + wrap(*n.b, strength(*n.b) < 3);
        case Op::sin:
            return "sin(" + print(*n.a) + ")";
        case Op::cos:
            return "cos(" + print(*n.a) + ")";
        case Op::exp:
            return "exp(" + print(*n.a) + ")";
        case Op::sqrt:
            return "sqrt(" + print(*n.a) + ")";
    }
    return "";
}

void collect(const Expression::Node& n, std::set<std::string>& out) {
    if (n.op == Op::ident && n.name != "pi") out.insert(n.name);
    if (n.a) collect(*n.a, out);
    if (n.b) collect(*n.b, out);
}

}  // namespace

const std::set<std::string>& Expression::default_identifiers() {
    static const std::set<std::string> ids{"z1", "z2", "z3", "xi", "k", "mu", "pi"};
    return ids;
}

Expression Expression::parse(const std::string& src) { return parse(src, default_identifiers()); }

Expression Expression::parse(const std::string& src, const std::set<std::string>& identifiers) {
    Parser p(src, identifiers);
    return Expression(p.run());
}

Real Expression::eval(const Bindings& bindings) const {
    const Real v = eval_node(*root_, bindings);
    if (!std::isfinite(v)) throw EvaluationError("expression evaluates to a non-finite value");
    return v;
}

std::string Expression::to_string() const { return print(*root_); }

std::set<std::string> Expression::identifiers() const {
    std::set<std::string> out;
    collect(*root_, out);
    return out;
}

bool Expression::is_zero_literal() const { return root_->op == Op::number && root_->value == 0.0; }

}  // namespace hjfield::cli
