// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#include "stickform/autodiff.h"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace stickform::ad {

Var Tape::variable(double value)
{
    return Var(value, this, push(kNone, 0.0, kNone, 0.0));
}

std::uint32_t Tape::push(std::uint32_t lhs, double dlhs, std::uint32_t rhs, double drhs)
{
    if (nodes_.size() >= kNone) throw std::length_error("autodiff tape overflow");
    nodes_.push_back({lhs, rhs, dlhs, drhs});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::vector<double> Tape::backward(std::span<const std::pair<Var, double>> seeds) const
{
    std::vector<double> adjoint(nodes_.size(), 0.0);
    for (const auto& [var, seed] : seeds) {
        if (var.is_constant()) continue;
        assert(var.tape() == this);
        adjoint[var.index()] += seed;
    }
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        const double a = adjoint[i];
        if (a == 0.0) continue;
        const Node& n = nodes_[i];
        if (n.lhs != kNone) adjoint[n.lhs] += a * n.dlhs;
        if (n.rhs != kNone) adjoint[n.rhs] += a * n.drhs;
    }
    return adjoint;
}

Var make_unary(const Var& a, double da, double value)
{
    if (a.is_constant()) return Var(value);
    Tape* t = a.tape();
    return Var(value, t, t->push(a.index(), da, Tape::kNone, 0.0));
}

Var make_binary(const Var& a, double da, const Var& b, double db, double value)
{
    if (a.is_constant()) return make_unary(b, db, value);
    if (b.is_constant()) return make_unary(a, da, value);
    assert(a.tape() == b.tape());
    Tape* t = a.tape();
    return Var(value, t, t->push(a.index(), da, b.index(), db));
}

Var sqrt(const Var& a)
{
    const double s = std::sqrt(a.value());
    return make_unary(a, s > 0.0 ? 0.5 / s : 0.0, s);
}

Var abs(const Var& a)
{
    return make_unary(a, a.value() < 0.0 ? -1.0 : 1.0, std::abs(a.value()));
}

}  // namespace stickform::ad
