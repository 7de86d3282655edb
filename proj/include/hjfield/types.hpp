#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjfield {

using Real = double;

// Base dimension is capped by the z1..z3 coordinate names of the expression
// language; field count is capped so every pair-indexed object fits in
// fixed storage and the hot loops never touch the heap.
inline constexpr int kMaxBaseDim = 4;
inline constexpr int kMaxFields = 4;
inline constexpr int kMaxPairs = kMaxBaseDim * kMaxFields;

/// Small dense vector/matrix with dynamic size and fixed capacity.
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxPairs, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxPairs, kMaxPairs>;

/// Position of the polymomentum p^mu_i in every flattened pair-indexed array.
constexpr int pair_index(int mu, int i, int r) { return mu * r + i; }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch or a violated precondition of a public call.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration or model parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A non-degeneracy condition of the initial pair failed at some grid node.
class RegularityError : public Error {
public:
    RegularityError(const std::string& what, std::ptrdiff_t node)
        : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
    std::ptrdiff_t node() const { return node_; }

private:
    std::ptrdiff_t node_;
};

/// Newton non-convergence, blow-up or a non-finite state during integration.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::ptrdiff_t node, Real xi)
        : Error(what + " (node " + std::to_string(node) + ", xi " + std::to_string(xi) + ")"),
          node_(node), xi_(xi) {}
    std::ptrdiff_t node() const { return node_; }
    Real xi() const { return xi_; }

private:
    std::ptrdiff_t node_;
    Real xi_;
};

}  // namespace hjfield
