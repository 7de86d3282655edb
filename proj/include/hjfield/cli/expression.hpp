#pragma once

#include "hjfield/types.hpp"

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace hjfield::cli {

/// Syntax error in an expression; offset() is the byte position in the source.
class ExpressionError : public ConfigError {
public:
    ExpressionError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Runtime failure while evaluating (division by zero, sqrt of a negative,
/// unbound identifier, non-finite result).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Values for the identifiers of an expression. pi is always bound.
class Bindings {
public:
    Bindings& set(const std::string& name, Real value);
    bool has(const std::string& name) const;
    Real get(const std::string& name) const;

private:
    std::vector<std::pair<std::string, Real>> values_;
};

/// Parsed arithmetic expression over numeric literals, identifiers, + - * / ^
/// (right-associative), unary minus and sin, cos, exp, sqrt.
///
/// Precedence from tight to loose: ^, unary minus, * /, + -. The exponent of
/// ^ may itself carry a unary minus, so 2^-1 is accepted and -2^2 is -4.
class Expression {
public:
    struct Node;

    /// Identifiers accepted by default: z1, z2, z3, xi, k, mu, pi.
    static const std::set<std::string>& default_identifiers();

    static Expression parse(const std::string& src);
    static Expression parse(const std::string& src, const std::set<std::string>& identifiers);

    Real eval(const Bindings& bindings) const;

    /// Canonical text; parsing it again gives an expression printing identically.
    std::string to_string() const;

    /// Identifiers referenced (pi excluded).
    std::set<std::string> identifiers() const;

    /// True when the expression is a single numeric literal equal to zero.
    bool is_zero_literal() const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace hjfield::cli
