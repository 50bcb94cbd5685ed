// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stickform/vec.h"

namespace stickform {

/// Closed loop; the last vertex connects back to the first.
using Ring = std::vector<Vec2>;

/// Boundary of one view in local [0,1]^2 coordinates. Outer rings run
/// counter-clockwise, holes clockwise; insideness is even-odd over all rings.
struct ViewPolygon {
    std::vector<Ring> outer;
    std::vector<Ring> holes;

    bool empty() const { return outer.empty() && holes.empty(); }
    friend bool operator==(const ViewPolygon&, const ViewPolygon&) = default;
};

/// The unit square, meaning "no detail".
ViewPolygon full_square();

/// Positive for counter-clockwise rings.
double signed_area(const Ring& r);

/// Outer area minus hole area.
double area(const ViewPolygon& p);

/// Even-odd test over every ring.
bool point_in_polygon(Vec2 p, const ViewPolygon& poly);

/// Distance from `p` to the closest ring segment; infinity for an empty polygon.
double polygon_distance(Vec2 p, const ViewPolygon& poly);

double segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Snaps vertices to multiples of 2^-53 inside [0,1], drops repeated
/// vertices and rings with fewer than three, and orients outer rings
/// counter-clockwise and holes clockwise. Reversal keeps the first vertex.
ViewPolygon normalized(ViewPolygon p);

double snap_coordinate(double x);

/// True if no two non-adjacent edges of the ring touch.
bool ring_is_simple(const Ring& r);

/// Throws ValidationError if a ring is open, self-intersecting, wrongly
/// oriented or leaves [0,1]^2 by more than 1e-9.
void validate(const ViewPolygon& p);

nlohmann::json to_json(const ViewPolygon& p);
ViewPolygon view_polygon_from_json(const nlohmann::json& j);

}  // namespace stickform
