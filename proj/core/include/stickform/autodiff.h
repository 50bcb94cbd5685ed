// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "stickform/vec.h"

namespace stickform::ad {

class Var;

/// Linear tape for reverse-mode differentiation. Every non-constant
/// operation appends one node holding at most two parent indices and the
/// local partial derivatives with respect to them. A backward sweep over the
/// nodes in reverse order accumulates adjoints.
///
/// A tape is owned by one computation at a time and is not thread-safe.
class Tape {
  public:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Creates an independent input variable.
    Var variable(double value);

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    /// Runs the backward sweep. `seeds` assign the adjoint of the output with
    /// respect to each listed variable; returns adjoints for every node.
    std::vector<double> backward(std::span<const std::pair<Var, double>> seeds) const;

  private:
    friend class Var;
    friend Var make_unary(const Var&, double, double);
    friend Var make_binary(const Var&, double, const Var&, double, double);

    struct Node {
        std::uint32_t lhs;
        std::uint32_t rhs;
        double dlhs;
        double drhs;
    };

    std::uint32_t push(std::uint32_t lhs, double dlhs, std::uint32_t rhs, double drhs);

    std::vector<Node> nodes_;
};

/// Scalar that records its computation on a Tape. Default-constructed and
/// double-constructed values are constants: they carry no node and never
/// receive adjoints.
class Var {
  public:
    Var() = default;
    Var(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

    double value() const { return value_; }
    bool is_constant() const { return tape_ == nullptr; }
    std::uint32_t index() const { return index_; }
    Tape* tape() const { return tape_; }

  private:
    friend class Tape;
    friend Var make_unary(const Var&, double, double);
    friend Var make_binary(const Var&, double, const Var&, double, double);

    Var(double v, Tape* t, std::uint32_t i) : value_(v), tape_(t), index_(i) {}

    double value_ = 0.0;
    Tape* tape_ = nullptr;
    std::uint32_t index_ = Tape::kNone;
};

Var make_unary(const Var& a, double da, double value);
Var make_binary(const Var& a, double da, const Var& b, double db, double value);

inline Var operator+(const Var& a, const Var& b)
{
    return make_binary(a, 1.0, b, 1.0, a.value() + b.value());
}
inline Var operator-(const Var& a, const Var& b)
{
    return make_binary(a, 1.0, b, -1.0, a.value() - b.value());
}
inline Var operator*(const Var& a, const Var& b)
{
    return make_binary(a, b.value(), b, a.value(), a.value() * b.value());
}
inline Var operator/(const Var& a, const Var& b)
{
    const double inv = 1.0 / b.value();
    const double q = a.value() / b.value();
    return make_binary(a, inv, b, -q * inv, q);
}
inline Var operator-(const Var& a) { return make_unary(a, -1.0, -a.value()); }

inline Var operator+(const Var& a, double b) { return make_unary(a, 1.0, a.value() + b); }
inline Var operator+(double a, const Var& b) { return make_unary(b, 1.0, a + b.value()); }
inline Var operator-(const Var& a, double b) { return make_unary(a, 1.0, a.value() - b); }
inline Var operator-(double a, const Var& b) { return make_unary(b, -1.0, a - b.value()); }
inline Var operator*(const Var& a, double b) { return make_unary(a, b, a.value() * b); }
inline Var operator*(double a, const Var& b) { return make_unary(b, a, a * b.value()); }
inline Var operator/(const Var& a, double b) { return make_unary(a, 1.0 / b, a.value() / b); }
inline Var operator/(double a, const Var& b)
{
    const double q = a / b.value();
    return make_unary(b, -q / b.value(), q);
}

Var sqrt(const Var& a);
Var abs(const Var& a);

/// Found by argument-dependent lookup from generic code.
inline double value_of(const Var& v) { return v.value(); }

}  // namespace stickform::ad
