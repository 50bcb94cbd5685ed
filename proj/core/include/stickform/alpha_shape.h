// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "stickform/polygon.h"

namespace stickform {

/// Delaunay triangulation (Bowyer-Watson). Triangles are counter-clockwise
/// index triples into the input; repeated points are referenced by their
/// first occurrence only. Exactly cocircular inputs are resolved by a tiny
/// deterministic perturbation.
struct Triangulation {
    std::vector<std::array<int, 3>> triangles;
    /// For each triangle, the neighbor across the edge opposite vertex k, or -1.
    std::vector<std::array<int, 3>> neighbors;
};

/// Throws DegenerateDetailError with fewer than three distinct points or
/// when all points are collinear.
Triangulation delaunay(std::span<const Vec2> points);

double circumradius(Vec2 a, Vec2 b, Vec2 c);

/// 1 / (4 * median nearest-neighbor spacing).
double default_alpha(std::span<const Vec2> points);

/// Boundary of the alpha complex: the Delaunay triangles with circumradius
/// below 1 / alpha, assembled into counter-clockwise outer rings and
/// clockwise holes. Without `alpha`, uses default_alpha.
ViewPolygon alpha_shape(std::span<const Vec2> points, std::optional<double> alpha = std::nullopt);

}  // namespace stickform
