// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stickform/polygon.h"
#include "stickform/template.h"

namespace stickform {

/// Three-view boundaries of one cuboid's content. The x view lies in the
/// local (y, z) plane, the y view in (x, z), the z view in (x, y).
struct Detail {
    std::array<ViewPolygon, 3> views{full_square(), full_square(), full_square()};

    const ViewPolygon& view(Axis a) const { return views[std::size_t(a)]; }
    ViewPolygon& view(Axis a) { return views[std::size_t(a)]; }
    friend bool operator==(const Detail&, const Detail&) = default;
};

/// All three views full squares.
Detail full_detail();

/// Local coordinates of the points inside each alive cuboid. A point inside
/// several cuboids appears in each; dead cuboids get empty clouds.
std::vector<std::vector<Vec3>> split_normalize(const StructureInstance& s, const PointCloud& p);

/// Drops the view axis: x -> (y, z), y -> (x, z), z -> (x, y).
Vec2 project(const Vec3& local, Axis view);
std::vector<Vec2> project(std::span<const Vec3> local, Axis view);

struct DetailOptions {
    std::optional<double> alpha;  ///< default: adaptive per view
    std::size_t min_points = 16;
};

/// Alpha-shape boundaries of the three projections. Views with too few or
/// degenerate points fall back to the full square, as do views whose
/// boundary comes out empty; boundaries that fail ring validation are
/// cleaned through a raster round trip.
Detail extract_detail(std::span<const Vec3> local, const DetailOptions& options = {});

/// split_normalize followed by extract_detail for every cuboid.
std::vector<Detail> extract_details(const StructureInstance& s, const PointCloud& p,
                                    const DetailOptions& options = {});

enum class Plane { yz, xz, xy };

/// Mirrors a detail across a local plane through the cuboid center.
Detail reflect_detail(const Detail& d, Plane plane);

/// Pixelwise (1 - t) a + t b at the detail resolution, thresholded at 0.5
/// and traced back to polygons.
Detail blend_details(const Detail& a, const Detail& b, double t);

nlohmann::json detail_to_json(const std::string& cuboid, const Detail& d);
/// Returns the cuboid name and the detail; views absent from the document
/// are full squares.
std::pair<std::string, Detail> detail_from_json(const nlohmann::json& j);

Plane plane_from_string(const std::string& s);

}  // namespace stickform
